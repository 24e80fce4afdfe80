#include "norden/spaceform.hpp"

#include <cmath>
#include <sstream>

#include "norden/errors.hpp"

namespace norden {

BasePointData metric_at(const SpaceForm& sf, std::span<const double> x) {
  const int n = sf.n;
  const double c = sf.c;
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double phi = 1.0 + 0.25 * c * r2;
  if (phi <= 1e-10) {
    std::ostringstream os;
    os << "point outside conformal chart: 1 + (c/4)|x|^2 = " << phi;
    throw DomainError(phi, os.str());
  }

  BasePointData bp;
  bp.x.assign(x.begin(), x.end());
  bp.g = Mat<double>(n, n, 0.0);
  bp.g_inv = Mat<double>(n, n, 0.0);
  bp.dg = Tens3<double>(n);
  bp.gamma = Tens3<double>(n);
  bp.dgamma = Tens4<double>(n);

  std::vector<double> dphi(n);  // d phi / d x^i = (c/2) x^i
  for (int i = 0; i < n; ++i) dphi[i] = 0.5 * c * x[i];
  const double ddphi = 0.5 * c;  // d^2 phi / dx^i dx^l = (c/2) delta_il

  const double inv_phi = 1.0 / phi;
  const double inv_phi2 = inv_phi * inv_phi;
  for (int i = 0; i < n; ++i) {
    bp.g(i, i) = inv_phi2;
    bp.g_inv(i, i) = phi * phi;
  }
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i) bp.dg(l, i, i) = -2.0 * dphi[l] * inv_phi2 * inv_phi;

  // sigma = -log phi: sigma_i = -phi_i/phi, sigma_il = -phi_il/phi + phi_i phi_l / phi^2
  std::vector<double> s1(n);
  for (int i = 0; i < n; ++i) s1[i] = -dphi[i] * inv_phi;
  Mat<double> s2(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double v = dphi[i] * dphi[l] * inv_phi2;
      if (i == l) v -= ddphi * inv_phi;
      s2(i, l) = v;
    }

  // Gamma^h_{ki} = delta^h_k s1_i + delta^h_i s1_k - delta_ki s1_h  (flat background)
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double v = 0.0;
        if (h == k) v += s1[i];
        if (h == i) v += s1[k];
        if (k == i) v -= s1[h];
        bp.gamma(h, k, i) = v;
      }

  for (int l = 0; l < n; ++l)
    for (int h = 0; h < n; ++h)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
          double v = 0.0;
          if (h == k) v += s2(i, l);
          if (h == i) v += s2(k, l);
          if (k == i) v -= s2(h, l);
          bp.dgamma(l, h, k, i) = v;
        }

  return bp;
}

Tens4<double> curvature_at(const SpaceForm& sf, std::span<const double> x) {
  const int n = sf.n;
  BasePointData bp = metric_at(sf, x);
  Tens4<double> R(n);
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = bp.dgamma(i, h, j, k) - bp.dgamma(j, h, i, k);
          for (int m = 0; m < n; ++m)
            v += bp.gamma(h, i, m) * bp.gamma(m, j, k) - bp.gamma(h, j, m) * bp.gamma(m, i, k);
          R(h, k, i, j) = v;
        }
  return R;
}

Mat<double> ricci_at(const SpaceForm& sf, std::span<const double> x) {
  const int n = sf.n;
  Tens4<double> R = curvature_at(sf, x);
  Mat<double> ric(n, n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += R(i, k, i, j);
      ric(k, j) = v;
    }
  return ric;
}

double curvature_residual(const SpaceForm& sf, std::span<const double> x) {
  const int n = sf.n;
  BasePointData bp = metric_at(sf, x);
  Tens4<double> R = curvature_at(sf, x);
  double worst = 0.0;
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double want = sf.c * ((h == i ? bp.g(k, j) : 0.0) - (h == j ? bp.g(k, i) : 0.0));
          worst = std::max(worst, std::abs(R(h, k, i, j) - want));
        }
  return worst;
}

}  // namespace norden

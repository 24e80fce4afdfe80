#include "norden/connection.hpp"

#include <array>
#include <cmath>

#include "norden/dval.hpp"

namespace norden {

namespace {

// Shared assembly of the coordinate components of J and G from base data,
// fiber coordinates and the twelve coefficients. Instantiated with plain
// doubles (finite-difference oracle path) and with DVal (analytic path,
// where every input carries its gradient in the 2n bundle coordinates).
template <class T, class CoeffFn>
void assemble_JG(int n, const Mat<T>& g, const Tens3<T>& gamma, const std::vector<T>& y,
                 CoeffFn&& coeffs_at, Mat<T>& J_co, Mat<T>& G_co) {
  T t(0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) t += T(0.5) * g(i, k) * y[i] * y[k];

  std::vector<T> g0(n, T(0.0));
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h) g0[i] += y[h] * g(h, i);

  // order: a1 a2 a3 b1 b2 b3 c1 c2 c3 d1 d2 d3
  std::array<T, 12> cf = coeffs_at(t);

  auto lin = [&](const T& alpha, const T& beta) {
    Mat<T> m(n, n, T(0.0));
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i) {
        T v = beta * y[h] * g0[i];
        if (h == i) v += alpha;
        m(h, i) = v;
      }
    return m;
  };
  auto sym = [&](const T& cv, const T& dv) {
    Mat<T> m(n, n, T(0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cv * g(i, j) + dv * g0[i] * g0[j];
    return m;
  };

  Mat<T> A1 = lin(cf[0], cf[3]), A2 = lin(cf[1], cf[4]), A3 = lin(cf[2], cf[5]);
  Mat<T> G1 = sym(cf[6], cf[9]), G2 = sym(cf[7], cf[10]), G3 = sym(cf[8], cf[11]);

  const int m2 = 2 * n;
  Mat<T> J_ad(m2, m2, T(0.0)), G_ad(m2, m2, T(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      J_ad(i, j) = -A3(i, j);
      J_ad(i, n + j) = -A2(i, j);
      J_ad(n + i, j) = A1(i, j);
      J_ad(n + i, n + j) = A3(i, j);
      G_ad(i, j) = G1(i, j);
      G_ad(i, n + j) = G3(i, j);
      G_ad(n + i, j) = G3(i, j);
      G_ad(n + i, n + j) = G2(i, j);
    }

  // frame matrices: delta_i = dx_i - Gamma^h_{0i} dy_h
  Mat<T> P = Mat<T>::identity(m2), Pinv = Mat<T>::identity(m2);
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i) {
      T gi(0.0);
      for (int k = 0; k < n; ++k) gi += y[k] * gamma(h, k, i);
      P(n + h, i) = -gi;
      Pinv(n + h, i) = gi;
    }

  J_co = P * J_ad * Pinv;
  G_co = Pinv.transposed() * G_ad * Pinv;
}

struct DualAssembly {
  int n = 0;
  Mat<DVal> J_co, G_co;
  BasePointData bp;
};

template <class JetsAt>
DualAssembly assemble_dual_impl(JetsAt&& jets_at, const SpaceForm& sf, const TangentPoint& p) {
  const int n = sf.n;
  const int nv = 2 * n;
  DualAssembly out;
  out.n = n;
  out.bp = metric_at(sf, p.x);

  Mat<DVal> g(n, n);
  Tens3<DVal> gamma(n, DVal(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<double> grad(nv, 0.0);
      for (int l = 0; l < n; ++l) grad[l] = out.bp.dg(l, i, j);
      g(i, j) = DVal::with_grad(out.bp.g(i, j), std::move(grad));
    }
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        std::vector<double> grad(nv, 0.0);
        for (int l = 0; l < n; ++l) grad[l] = out.bp.dgamma(l, h, k, i);
        gamma(h, k, i) = DVal::with_grad(out.bp.gamma(h, k, i), std::move(grad));
      }
  std::vector<DVal> y(n);
  for (int i = 0; i < n; ++i) y[i] = DVal::seed(p.y[i], nv, n + i);

  auto coeffs_at = [&](const DVal& t) {
    CoeffJets j = jets_at(t.value());
    auto lift = [&](Jet1 cj) {
      std::vector<double> grad(nv, 0.0);
      for (int l = 0; l < nv; ++l) grad[l] = cj.d * t.partial(l);
      return DVal::with_grad(cj.v, std::move(grad));
    };
    return std::array<DVal, 12>{lift(j.a1), lift(j.a2), lift(j.a3), lift(j.b1),
                                lift(j.b2), lift(j.b3), lift(j.c1), lift(j.c2),
                                lift(j.c3), lift(j.d1), lift(j.d2), lift(j.d3)};
  };

  assemble_JG<DVal>(n, g, gamma, y, coeffs_at, out.J_co, out.G_co);
  return out;
}

DualAssembly assemble_dual(const CoefficientFamily& fam, const SpaceForm& sf,
                           const TangentPoint& p) {
  return assemble_dual_impl([&](double t) { return fam.jets_at(t); }, sf, p);
}

void split_values_derivs(const Mat<DVal>& m, Mat<double>& values, Tens3<double>& derivs) {
  const int sz = m.rows();
  values = Mat<double>(sz, sz, 0.0);
  derivs = Tens3<double>(sz, 0.0);
  for (int a = 0; a < sz; ++a)
    for (int b = 0; b < sz; ++b) {
      values(a, b) = m(a, b).value();
      for (int l = 0; l < sz; ++l) derivs(l, a, b) = m(a, b).partial(l);
    }
}

ConnectionData connection_from(const Mat<DVal>& G_dual) {
  ConnectionData cd;
  const int m2 = G_dual.rows();
  cd.n = m2 / 2;
  split_values_derivs(G_dual, cd.G_co, cd.dG_co);

  Mat<double> H = inverse(cd.G_co);
  cd.gammaG = Tens3<double>(m2, 0.0);
  for (int A = 0; A < m2; ++A)
    for (int B = 0; B < m2; ++B)
      for (int C = 0; C < m2; ++C) {
        double s = 0.0;
        for (int D = 0; D < m2; ++D)
          s += H(A, D) *
               (cd.dG_co(B, D, C) + cd.dG_co(C, D, B) - cd.dG_co(D, B, C));
        cd.gammaG(A, B, C) = 0.5 * s;
      }

  double worst = 0.0;
  for (int A = 0; A < m2; ++A)
    for (int B = 0; B < m2; ++B)
      for (int C = 0; C < m2; ++C) {
        double v = cd.dG_co(A, B, C);
        for (int D = 0; D < m2; ++D)
          v -= cd.gammaG(D, A, B) * cd.G_co(D, C) + cd.gammaG(D, A, C) * cd.G_co(B, D);
        worst = std::max(worst, std::abs(v));
      }
  cd.metricity_residual = worst;
  return cd;
}

Tens3<double> f_coord(const ConnectionData& cd, const Mat<double>& J_val,
                      const Tens3<double>& dJ) {
  const int m2 = cd.G_co.rows();
  // (nabla_A J)^D_B
  Tens3<double> nablaJ(m2, 0.0);
  for (int A = 0; A < m2; ++A)
    for (int D = 0; D < m2; ++D)
      for (int B = 0; B < m2; ++B) {
        double v = dJ(A, D, B);
        for (int E = 0; E < m2; ++E)
          v += cd.gammaG(D, A, E) * J_val(E, B) - cd.gammaG(E, A, B) * J_val(D, E);
        nablaJ(A, D, B) = v;
      }
  Tens3<double> F(m2, 0.0);
  for (int A = 0; A < m2; ++A)
    for (int B = 0; B < m2; ++B)
      for (int C = 0; C < m2; ++C) {
        double v = 0.0;
        for (int D = 0; D < m2; ++D) v += nablaJ(A, D, B) * cd.G_co(D, C);
        F(A, B, C) = v;
      }
  return F;
}

PhiForm phi_from(const AdaptedFrame& fr, const FTensor& F, std::span<const double> g0) {
  const int n = fr.n;
  const int m2 = 2 * n;
  PhiForm phi;
  phi.n = n;
  phi.comp.assign(m2, 0.0);
  for (int c = 0; c < m2; ++c) {
    double s = 0.0;
    for (int A = 0; A < m2; ++A)
      for (int B = 0; B < m2; ++B) s += fr.H(A, B) * F.F(A, B, c);
    phi.comp[c] = s;
  }
  double g0sq = 0.0, dot = 0.0, mx = 0.0;
  for (int k = 0; k < n; ++k) {
    g0sq += g0[k] * g0[k];
    dot += phi.comp[k] * g0[k];
    mx = std::max(mx, std::abs(phi.comp[k]));
  }
  phi.horizontal_factor = g0sq > 1e-30 ? dot / g0sq : 0.0;
  double off = 0.0;
  for (int k = 0; k < n; ++k)
    off = std::max(off, std::abs(phi.comp[k] - phi.horizontal_factor * g0[k]));
  phi.horizontal_off_residual = off / (1.0 + mx);
  return phi;
}

}  // namespace

double FTensor::symmetry_last_two() const {
  const int m2 = 2 * n;
  double worst = 0.0;
  for (int a = 0; a < m2; ++a)
    for (int b = 0; b < m2; ++b)
      for (int c = 0; c < m2; ++c) worst = std::max(worst, std::abs(F(a, b, c) - F(a, c, b)));
  return worst;
}

double FTensor::symmetry_J_pair(const Mat<double>& J_ad) const {
  const int m2 = 2 * n;
  double worst = 0.0;
  for (int a = 0; a < m2; ++a)
    for (int b = 0; b < m2; ++b)
      for (int c = 0; c < m2; ++c) {
        double v = 0.0;  // F(a, Jb, Jc)
        for (int bb = 0; bb < m2; ++bb) {
          if (J_ad(bb, b) == 0.0) continue;
          for (int cc = 0; cc < m2; ++cc) v += J_ad(bb, b) * J_ad(cc, c) * F(a, bb, cc);
        }
        worst = std::max(worst, std::abs(F(a, b, c) - v));
      }
  return worst;
}

double PhiForm::max_abs() const {
  double m = 0.0;
  for (double v : comp) m = std::max(m, std::abs(v));
  return m;
}

ConnectionData christoffels_of_G(const CoefficientFamily& fam, const SpaceForm& sf,
                                 const TangentPoint& p) {
  DualAssembly da = assemble_dual(fam, sf, p);
  return connection_from(da.G_co);
}

static PointTensors point_tensors_from(DualAssembly da, AdaptedFrame frame,
                                       const TangentPoint& p) {
  const int n = da.n;
  const int m2 = 2 * n;

  PointTensors pt;
  pt.n = n;
  pt.frame = std::move(frame);

  ConnectionData cd = connection_from(da.G_co);
  pt.metricity_residual = cd.metricity_residual;

  Mat<double> J_val;
  Tens3<double> dJ;
  split_values_derivs(da.J_co, J_val, dJ);

  Tens3<double> F_co = f_coord(cd, J_val, dJ);
  Mat<double> P = adapted_frame_matrix(da.bp, p.y);
  pt.F.n = n;
  pt.F.F = coordinate_to_adapted_03(P, F_co);

  std::vector<double> g0(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h) g0[i] += p.y[h] * da.bp.g(h, i);
  pt.phi = phi_from(pt.frame, pt.F, g0);

  pt.nijenhuis = Tens3<double>(m2, 0.0);
  double scale = 0.0;
  for (int A = 0; A < m2; ++A)
    for (int B = 0; B < m2; ++B)
      for (int C = 0; C < m2; ++C) {
        double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
        for (int D = 0; D < m2; ++D) {
          t1 += J_val(D, B) * dJ(D, A, C);
          t2 += J_val(D, C) * dJ(D, A, B);
          t3 += J_val(A, D) * dJ(B, D, C);
          t4 += J_val(A, D) * dJ(C, D, B);
        }
        pt.nijenhuis(A, B, C) = t1 - t2 - t3 + t4;
        scale = std::max({scale, std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
      }
  pt.nijenhuis_scale = scale;
  return pt;
}

PointTensors point_tensors(const CoefficientFamily& fam, const SpaceForm& sf,
                           const TangentPoint& p) {
  return point_tensors_from(assemble_dual(fam, sf, p), frame_at(fam, sf, p), p);
}

PointTensors point_tensors_with(const CoeffJets& jets, const SpaceForm& sf,
                                const TangentPoint& p) {
  return point_tensors_from(assemble_dual_impl([&](double) { return jets; }, sf, p),
                            frame_from_jets(jets, sf, p), p);
}

FTensor f_tensor_at(const CoefficientFamily& fam, const SpaceForm& sf, const TangentPoint& p) {
  return point_tensors(fam, sf, p).F;
}

PhiForm phi_at(const CoefficientFamily& fam, const SpaceForm& sf, const TangentPoint& p) {
  return point_tensors(fam, sf, p).phi;
}

Tens3<double> nijenhuis_at(const CoefficientFamily& fam, const SpaceForm& sf,
                           const TangentPoint& p) {
  return point_tensors(fam, sf, p).nijenhuis;
}

void coordinate_JG_values(const CoefficientFamily& fam, const SpaceForm& sf,
                          std::span<const double> x, std::span<const double> y,
                          Mat<double>& J_co, Mat<double>& G_co) {
  const int n = sf.n;
  BasePointData bp = metric_at(sf, x);
  std::vector<double> yv(y.begin(), y.end());
  auto coeffs_at = [&](double t) {
    CoeffJets j = fam.jets_at(t);
    return std::array<double, 12>{j.a1.v, j.a2.v, j.a3.v, j.b1.v, j.b2.v, j.b3.v,
                                  j.c1.v, j.c2.v, j.c3.v, j.d1.v, j.d2.v, j.d3.v};
  };
  assemble_JG<double>(n, bp.g, bp.gamma, yv, coeffs_at, J_co, G_co);
}

void coordinate_JG_derivatives(const CoefficientFamily& fam, const SpaceForm& sf,
                               const TangentPoint& p, Tens3<double>& dJ, Tens3<double>& dG) {
  DualAssembly da = assemble_dual(fam, sf, p);
  Mat<double> vals;
  split_values_derivs(da.J_co, vals, dJ);
  split_values_derivs(da.G_co, vals, dG);
}

}  // namespace norden

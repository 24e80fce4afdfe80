#include "norden/lift.hpp"

#include <cmath>
#include <sstream>

#include "norden/errors.hpp"

namespace norden {

namespace {

Taylor two_t(double t, int order) { return Taylor::variable(t, order) * 2.0; }

void require_nonvanishing(const Taylor& den, double t, const char* what) {
  if (std::abs(den.value()) < kMinDivisor) {
    std::ostringstream os;
    os << what << " vanishes at t=" << t;
    throw DenominatorError(t, os.str());
  }
}

// alpha + 2 t beta as a series at t
Taylor bar(const ScalarFn& alpha, const ScalarFn& beta, double t, int order) {
  return alpha.eval_taylor(t, order) + two_t(t, order) * beta.eval_taylor(t, order);
}

}  // namespace

// Find a zero crossing of f on [0, t_max) and report it; used so that a
// family with a vanishing structural denominator fails loudly at build time.
void require_nonvanishing_on(const ScalarFn& f, double t_max, const char* what) {
  const int kSamples = 256;
  double prev_t = 0.0;
  double prev_v = f.eval_jet(0.0).v;
  for (int i = 1; i <= kSamples; ++i) {
    double t = t_max * (static_cast<double>(i) / kSamples) * (1.0 - 1e-9);
    double v = f.eval_jet(t).v;
    if (std::abs(v) < 1e-9 || prev_v * v < 0.0) {
      // bisect for a tighter location
      double lo = prev_t, hi = t, flo = prev_v;
      for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f.eval_jet(mid).v;
        if (flo * fm <= 0.0) hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      std::ostringstream os;
      os << what << " crosses zero near t=" << 0.5 * (lo + hi);
      throw DenominatorError(0.5 * (lo + hi), os.str());
    }
    prev_t = t;
    prev_v = v;
  }
}

CoeffJets CoefficientFamily::jets_at(double t) const {
  return CoeffJets{a1.eval_jet(t), a2.eval_jet(t), a3.eval_jet(t), b1.eval_jet(t),
                   b2.eval_jet(t), b3.eval_jet(t), c1.eval_jet(t), c2.eval_jet(t),
                   c3.eval_jet(t), d1.eval_jet(t), d2.eval_jet(t), d3.eval_jet(t)};
}

const std::array<const char*, 12>& CoefficientFamily::coefficient_keys() {
  static const std::array<const char*, 12> keys = {"a1", "a2", "a3", "b1", "b2", "b3",
                                                   "c1", "c2", "c3", "d1", "d2", "d3"};
  return keys;
}

const ScalarFn& CoefficientFamily::coefficient(const std::string& key) const {
  if (key == "a1") return a1;
  if (key == "a2") return a2;
  if (key == "a3") return a3;
  if (key == "b1") return b1;
  if (key == "b2") return b2;
  if (key == "b3") return b3;
  if (key == "c1") return c1;
  if (key == "c2") return c2;
  if (key == "c3") return c3;
  if (key == "d1") return d1;
  if (key == "d2") return d2;
  if (key == "d3") return d3;
  throw ConfigError("unknown coefficient '" + key + "'");
}

CoefficientFamily CoefficientFamily::with_coefficient(const std::string& key,
                                                      ScalarFn fn) const {
  CoefficientFamily out = *this;
  ScalarFn* slot = nullptr;
  if (key == "a1") slot = &out.a1;
  else if (key == "a2") slot = &out.a2;
  else if (key == "a3") slot = &out.a3;
  else if (key == "b1") slot = &out.b1;
  else if (key == "b2") slot = &out.b2;
  else if (key == "b3") slot = &out.b3;
  else if (key == "c1") slot = &out.c1;
  else if (key == "c2") slot = &out.c2;
  else if (key == "c3") slot = &out.c3;
  else if (key == "d1") slot = &out.d1;
  else if (key == "d2") slot = &out.d2;
  else if (key == "d3") slot = &out.d3;
  else throw ConfigError("unknown coefficient '" + key + "'");
  *slot = std::move(fn);
  return out;
}

CoefficientFamily CoefficientFamily::perturbed(const std::string& key, double delta) const {
  CoefficientFamily out = with_coefficient(key, coefficient(key) + delta);
  out.name = name + " [" + key + "+=" + std::to_string(delta) + "]";
  return out;
}

CoefficientFamily CoefficientFamily::scaled(const std::string& key, double factor) const {
  CoefficientFamily out = with_coefficient(key, factor * coefficient(key));
  out.name = name + " [" + key + "*=" + std::to_string(factor) + "]";
  return out;
}

TangentPoint make_tangent_point(const SpaceForm& sf, std::vector<double> x,
                                std::vector<double> y) {
  BasePointData bp = metric_at(sf, x);
  double t = 0.0;
  for (int i = 0; i < sf.n; ++i)
    for (int k = 0; k < sf.n; ++k) t += 0.5 * bp.g(i, k) * y[i] * y[k];
  return TangentPoint{std::move(x), std::move(y), t};
}

AdaptedFrame frame_at(const CoefficientFamily& fam, const SpaceForm& sf,
                      const TangentPoint& p) {
  try {
    return frame_from_jets(fam.jets_at(p.t), sf, p);
  } catch (const DegenerateError&) {
    std::ostringstream os;
    os << "metric of the lift degenerate at t=" << p.t << " for family '" << fam.name << "'";
    throw DegenerateError(os.str());
  }
}

AdaptedFrame frame_from_jets(const CoeffJets& cj, const SpaceForm& sf,
                             const TangentPoint& p) {
  const int n = sf.n;
  BasePointData bp = metric_at(sf, p.x);

  std::vector<double> g0(n, 0.0);  // g_0i = y^h g_hi
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h) g0[i] += p.y[h] * bp.g(h, i);

  auto lin = [&](double alpha, double beta) {
    Mat<double> m(n, n, 0.0);
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i) m(h, i) = alpha * (h == i ? 1.0 : 0.0) + beta * p.y[h] * g0[i];
    return m;
  };
  auto sym = [&](double cval, double dval) {
    Mat<double> m(n, n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cval * bp.g(i, j) + dval * g0[i] * g0[j];
    return m;
  };

  AdaptedFrame fr;
  fr.n = n;
  fr.J = Mat<double>(2 * n, 2 * n, 0.0);
  fr.G = Mat<double>(2 * n, 2 * n, 0.0);

  Mat<double> A1 = lin(cj.a1.v, cj.b1.v), A2 = lin(cj.a2.v, cj.b2.v), A3 = lin(cj.a3.v, cj.b3.v);
  Mat<double> G1 = sym(cj.c1.v, cj.d1.v), G2 = sym(cj.c2.v, cj.d2.v), G3 = sym(cj.c3.v, cj.d3.v);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      fr.J(i, j) = -A3(i, j);
      fr.J(i, n + j) = -A2(i, j);
      fr.J(n + i, j) = A1(i, j);
      fr.J(n + i, n + j) = A3(i, j);
      fr.G(i, j) = G1(i, j);
      fr.G(i, n + j) = G3(i, j);
      fr.G(n + i, j) = G3(i, j);
      fr.G(n + i, n + j) = G2(i, j);
    }

  fr.H = inverse(fr.G);
  fr.H1 = fr.H.block(0, 0, n, n);
  fr.H2 = fr.H.block(n, n, n, n);
  fr.H3 = fr.H.block(0, n, n, n);
  return fr;
}

ConstraintReport check_family(const CoefficientFamily& fam, std::span<const double> samples) {
  ConstraintReport rep;
  rep.entries = {{"eq2.4a", 0.0}, {"eq2.4b", 0.0}, {"eq2.8", 0.0}, {"eq2.9", 0.0}};
  rep.min_nondegeneracy = std::numeric_limits<double>::infinity();
  for (double t : samples) {
    CoeffJets j = fam.jets_at(t);
    auto brv = [&](Jet1 a, Jet1 b) { return a.v + 2.0 * t * b.v; };
    double a1b = brv(j.a1, j.b1), a2b = brv(j.a2, j.b2), a3b = brv(j.a3, j.b3);
    double c1b = brv(j.c1, j.d1), c2b = brv(j.c2, j.d2), c3b = brv(j.c3, j.d3);
    double r0 = std::abs(j.a1.v * j.a2.v - 1.0 - j.a3.v * j.a3.v);
    double r1 = std::abs(a1b * a2b - 1.0 - a3b * a3b);
    double r2 = std::abs(j.a2.v * j.c1.v + j.a1.v * j.c2.v - 2.0 * j.a3.v * j.c3.v);
    double r3 = std::abs(a2b * c1b + a1b * c2b - 2.0 * a3b * c3b);
    rep.entries[0].max_residual = std::max(rep.entries[0].max_residual, r0);
    rep.entries[1].max_residual = std::max(rep.entries[1].max_residual, r1);
    rep.entries[2].max_residual = std::max(rep.entries[2].max_residual, r2);
    rep.entries[3].max_residual = std::max(rep.entries[3].max_residual, r3);
    rep.min_nondegeneracy =
        std::min({rep.min_nondegeneracy, std::abs(j.c1.v * j.c2.v - j.c3.v * j.c3.v),
                  std::abs(c1b * c2b - c3b * c3b)});
  }
  for (const auto& e : rep.entries) rep.max_residual = std::max(rep.max_residual, e.max_residual);
  return rep;
}

FrameResiduals frame_residuals(const CoefficientFamily& fam, const SpaceForm& sf,
                               std::span<const TangentPoint> points) {
  FrameResiduals out;
  for (const TangentPoint& p : points) {
    AdaptedFrame fr = frame_at(fam, sf, p);
    const int m2 = 2 * fr.n;
    Mat<double> jj = fr.J * fr.J + Mat<double>::identity(m2);
    Mat<double> njg = fr.J.transposed() * fr.G * fr.J + fr.G;
    out.j_squared = std::max(out.j_squared, jj.max_abs());
    out.norden = std::max(out.norden, njg.max_abs());
  }
  return out;
}

CoefficientFamily complete_norden(std::string name, ScalarFn a1, ScalarFn a3, ScalarFn b1,
                                  ScalarFn b3, ScalarFn c1, ScalarFn c3, ScalarFn d1,
                                  ScalarFn d3, double curvature, double t_max, bool analytic) {
  for (const ScalarFn* f : {&a1, &a3, &b1, &b3, &c1, &c3, &d1, &d3})
    t_max = std::min(t_max, f->t_max());

  require_nonvanishing_on(a1, t_max, "a1");
  {
    auto a1bar = make_composite(
        "a1+2t*b1", t_max,
        [a1, b1](double t, int order) { return bar(a1, b1, t, order); });
    require_nonvanishing_on(a1bar, t_max, "a1+2t*b1");
  }

  auto a2 = make_composite("(1+a3^2)/a1", t_max, [a1, a3](double t, int order) {
    Taylor a1t = a1.eval_taylor(t, order);
    require_nonvanishing(a1t, t, "a1");
    Taylor a3t = a3.eval_taylor(t, order);
    return (1.0 + a3t * a3t) / a1t;
  });

  // a2 + 2t b2 has the closed form (1 + (a3+2t b3)^2)/(a1+2t b1)
  auto a2bar_at = [a1, a3, b1, b3](double t, int order) {
    Taylor den = bar(a1, b1, t, order);
    require_nonvanishing(den, t, "a1+2t*b1");
    Taylor a3b = bar(a3, b3, t, order);
    return (1.0 + a3b * a3b) / den;
  };

  // N(t)/(2t) where N vanishes identically at t = 0: direct series quotient
  // away from zero, series continuation from the origin below kSmallT.
  auto div_two_t = [](const std::function<Taylor(double, int)>& num, double t, int order) {
    if (t >= kSmallT) return num(t, order) / two_t(t, order);
    Taylor n0 = num(0.0, order + 3);
    Taylor q = n0.shifted_down() * 0.5;
    return q.shift_to(t).truncated(order);
  };

  ScalarFn a2fn = a2;
  auto b2 = make_composite("b2[completed]", t_max,
                           [a2fn, a2bar_at, div_two_t](double t, int order) {
                             auto num = [&](double tt, int k) {
                               return a2bar_at(tt, k) - a2fn.eval_taylor(tt, k);
                             };
                             return div_two_t(num, t, order);
                           });

  auto c2 = make_composite("(2*a3*c3-a2*c1)/a1", t_max,
                           [a1, a3, c1, c3, a2fn](double t, int order) {
                             Taylor a1t = a1.eval_taylor(t, order);
                             require_nonvanishing(a1t, t, "a1");
                             return (2.0 * a3.eval_taylor(t, order) * c3.eval_taylor(t, order) -
                                     a2fn.eval_taylor(t, order) * c1.eval_taylor(t, order)) /
                                    a1t;
                           });

  auto c2bar_at = [a1, a3, b1, b3, c1, c3, d1, d3, a2bar_at](double t, int order) {
    Taylor den = bar(a1, b1, t, order);
    require_nonvanishing(den, t, "a1+2t*b1");
    return (2.0 * bar(a3, b3, t, order) * bar(c3, d3, t, order) -
            a2bar_at(t, order) * bar(c1, d1, t, order)) /
           den;
  };

  ScalarFn c2fn = c2;
  auto d2 = make_composite("d2[completed]", t_max,
                           [c2fn, c2bar_at, div_two_t](double t, int order) {
                             auto num = [&](double tt, int k) {
                               return c2bar_at(tt, k) - c2fn.eval_taylor(tt, k);
                             };
                             return div_two_t(num, t, order);
                           });

  CoefficientFamily fam;
  fam.seeds = std::make_shared<const NordenSeeds>(NordenSeeds{a1, a3, b1, b3, c1, c3, d1, d3});
  fam.a1 = std::move(a1);
  fam.a2 = a2;
  fam.a3 = std::move(a3);
  fam.b1 = std::move(b1);
  fam.b2 = b2;
  fam.b3 = std::move(b3);
  fam.c1 = std::move(c1);
  fam.c2 = c2;
  fam.c3 = std::move(c3);
  fam.d1 = std::move(d1);
  fam.d2 = d2;
  fam.d3 = std::move(d3);
  fam.name = std::move(name);
  fam.curvature = curvature;
  fam.t_max = t_max;
  fam.analytic = analytic;
  return fam;
}

CoeffJets complete_norden_jets(const NordenSeedJets& s, double t) {
  if (t < kSmallT)
    throw DomainError(t, "jet-level completion needs t >= 1e-4; use the series path");
  Jet1 tb(t, 1.0);
  auto brj = [&](Jet1 a, Jet1 b) { return a + 2.0 * tb * b; };
  CoeffJets j;
  j.a1 = s.a1;
  j.a3 = s.a3;
  j.b1 = s.b1;
  j.b3 = s.b3;
  j.c1 = s.c1;
  j.c3 = s.c3;
  j.d1 = s.d1;
  j.d3 = s.d3;
  j.a2 = (Jet1(1.0) + s.a3 * s.a3) / s.a1;
  Jet1 a3b = brj(s.a3, s.b3);
  Jet1 a1b = brj(s.a1, s.b1);
  Jet1 a2bar = (Jet1(1.0) + a3b * a3b) / a1b;
  j.b2 = (a2bar - j.a2) / (2.0 * tb);
  j.c2 = (2.0 * s.a3 * s.c3 - j.a2 * s.c1) / s.a1;
  Jet1 c2bar = (2.0 * a3b * brj(s.c3, s.d3) - a2bar * brj(s.c1, s.d1)) / a1b;
  j.d2 = (c2bar - j.c2) / (2.0 * tb);
  return j;
}

Mat<double> adapted_frame_matrix(const BasePointData& bp, std::span<const double> y) {
  const int n = bp.g.rows();
  Mat<double> P = Mat<double>::identity(2 * n);
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i) {
      double g0 = 0.0;  // Gamma^h_{0i} = y^k Gamma^h_{ki}
      for (int k = 0; k < n; ++k) g0 += y[k] * bp.gamma(h, k, i);
      P(n + h, i) = -g0;
    }
  return P;
}

Mat<double> adapted_frame_matrix_inverse(const BasePointData& bp, std::span<const double> y) {
  const int n = bp.g.rows();
  Mat<double> Pinv = Mat<double>::identity(2 * n);
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i) {
      double g0 = 0.0;
      for (int k = 0; k < n; ++k) g0 += y[k] * bp.gamma(h, k, i);
      Pinv(n + h, i) = g0;
    }
  return Pinv;
}

Mat<double> adapted_to_coordinate_11(const Mat<double>& P, const Mat<double>& Pinv,
                                     const Mat<double>& ad) {
  return P * ad * Pinv;
}

Mat<double> coordinate_to_adapted_11(const Mat<double>& P, const Mat<double>& Pinv,
                                     const Mat<double>& co) {
  return Pinv * co * P;
}

Mat<double> adapted_to_coordinate_02(const Mat<double>& Pinv, const Mat<double>& ad) {
  return Pinv.transposed() * ad * Pinv;
}

Mat<double> coordinate_to_adapted_02(const Mat<double>& P, const Mat<double>& co) {
  return P.transposed() * co * P;
}

Tens3<double> coordinate_to_adapted_03(const Mat<double>& P, const Tens3<double>& co) {
  const int m = P.rows();
  Tens3<double> ad(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double s = 0.0;
        for (int A = 0; A < m; ++A) {
          if (P(A, a) == 0.0) continue;
          for (int B = 0; B < m; ++B) {
            if (P(B, b) == 0.0) continue;
            for (int C = 0; C < m; ++C) s += P(A, a) * P(B, b) * P(C, c) * co(A, B, C);
          }
        }
        ad(a, b, c) = s;
      }
  return ad;
}

Tens3<double> adapted_to_coordinate_03(const Mat<double>& Pinv, const Tens3<double>& ad) {
  return coordinate_to_adapted_03(Pinv, ad);
}

}  // namespace norden

#pragma once

#include <sstream>

#include "norden/errors.hpp"
#include "norden/jet.hpp"

namespace norden {

/// Inputs for the closed-form coefficient derivative laws of the structure
/// classes. Fields carry values (and, where a law needs them, first
/// derivatives) of the free coefficients at one t; `curv` is the constant
/// sectional curvature of the base.
template <class S>
struct RateArgs {
  S t{0.0};
  S a1{0.0}, a1p{0.0};
  S a3{0.0}, a3p{0.0};
  S b1{0.0}, b3{0.0};
  S c1{0.0}, c1p{0.0};
  S c3{0.0};
  S d1{0.0}, d3{0.0};
  double curv = 0.0;
};

namespace detail {

template <class S>
S checked_div(const S& num, const S& den, double t, const char* what) {
  if (std::abs(value(den)) < 1e-10) {
    std::ostringstream os;
    os << what << " vanishes at t=" << t;
    throw DenominatorError(t, os.str());
  }
  return num / den;
}

}  // namespace detail

/// Structural denominator of the parallel-structure (F = 0) derivative laws:
/// a1^4 + 4 a1^2 (a3^2 - 1) c t + 4 (1 + a3^2)^2 c^2 t^2. Positive for c > 0.
template <class S>
S ak_denominator(const RateArgs<S>& r) {
  const double c = r.curv;
  S a1sq = r.a1 * r.a1;
  S opa = 1.0 + r.a3 * r.a3;
  return a1sq * a1sq + 4.0 * c * (r.a3 * r.a3 - 1.0) * a1sq * r.t +
         4.0 * c * c * opa * opa * r.t * r.t;
}

template <class S>
S ak_c1_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S den4 = ak_denominator(r);
  S num1 = 2.0 * r.c3 * (r.a1 * (r.a3 + r.a3p * r.t) - 2.0 * r.a1p * r.a3 * r.t) - r.c1 * opa;
  S num2 = c * r.c1 * r.t *
               (2.0 * r.a1 * (opa + 4.0 * r.a3 * r.a3p * r.t) - 4.0 * r.a1p * opa * r.t) +
           2.0 * r.a1 * r.a1 * r.t * (r.a1p * r.c1 - 2.0 * r.a3p * c * r.c3 * r.t);
  S t1 = detail::checked_div(-2.0 * c * r.a1 * r.a1 * num1, den4, value(r.t),
                             "parallel-structure denominator");
  S t2 = detail::checked_div(-2.0 * c * opa * num2, r.a1 * den4, value(r.t),
                             "parallel-structure denominator");
  return t1 + t2;
}

template <class S>
S ak_c3_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S den4 = ak_denominator(r);
  S a1q = r.a1 * r.a1 * r.a1 * r.a1;
  S num1 = r.c3 * (r.a1 + r.a3 * (4.0 * r.t * (r.a1p * r.a3 - r.a1 * r.a3p) -
                                  3.0 * r.a1 * r.a3)) +
           2.0 * r.a3 * r.c1 * (opa + 2.0 * r.a3 * r.a3p * r.t);
  S num2 = (r.a3p * r.c1 - r.a1p * r.c3) * (a1q - 4.0 * c * c * opa * opa * r.t * r.t) -
           4.0 * c * r.a1 * opa * (2.0 * r.a1p * r.a3 * r.c1 + c * opa * r.c3) * r.t;
  S t1 = detail::checked_div(2.0 * c * r.a1 * num1, den4, value(r.t),
                             "parallel-structure denominator");
  S t2 = detail::checked_div(num2, r.a1 * den4, value(r.t), "parallel-structure denominator");
  return t1 + t2;
}

/// c1' and d1' shared by all quasi (cyclic-identity) structures.
template <class S>
S quasi_c1_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  return detail::checked_div(-2.0 * (r.a1 * r.d1 + 2.0 * c * r.b3 * r.c3 * r.t),
                             r.a1 + 2.0 * r.b1 * r.t, value(r.t), "a1+2t*b1");
}

template <class S>
S quasi_d1_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  return detail::checked_div(2.0 * (c * r.b3 * r.c3 - r.b1 * r.d1),
                             r.a1 + 2.0 * r.b1 * r.t, value(r.t), "a1+2t*b1");
}

template <class S>
S quasi_c3_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S shift = r.a1 + 2.0 * r.b1 * r.t;
  S t1 = detail::checked_div(2.0 * c * opa * r.b3 * r.c1 * r.t, r.a1 * r.a1 * shift,
                             value(r.t), "a1^2*(a1+2t*b1)");
  S num2 = r.a1 * (r.b3 * r.c1 - r.b1 * r.c3 - 2.0 * r.a3 * r.d1) +
           c * r.c3 * (opa - 4.0 * r.a3 * r.b3 * r.t);
  S t2 = detail::checked_div(num2, r.a1 * shift, value(r.t), "a1*(a1+2t*b1)");
  return t1 + t2;
}

/// a3' of the quasi class; needs no other rates.
template <class S>
S quasi_a3_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S shift = r.a1 + 2.0 * r.b1 * r.t;
  S den = (opa * r.c1 * r.c1 - r.a1 * r.c3 * (2.0 * r.a3 * r.c1 + r.a1 * r.c3)) * shift;
  S num1 = r.b3 * (r.c1 * r.c1 + 2.0 * c * r.c3 * r.c3 * r.t + 4.0 * r.c1 * r.d1 * r.t) +
           2.0 * r.c1 * (r.a3 * r.d1 - r.b1 * (r.c3 + 2.0 * r.d3 * r.t));
  S num2 = r.c1 * r.d3 - r.c3 * r.d1 + r.a3 * r.a3 * (r.c3 * r.d1 + r.c1 * r.d3) -
           r.a3 * r.c3 * (r.b1 * (r.c3 + 2.0 * r.d3 * r.t) - 2.0 * r.b3 * r.d1 * r.t);
  S a1q = r.a1 * r.a1 * r.a1 * r.a1;
  S num3 = a1q * r.c3 * (r.b3 * r.c3 - 2.0 * r.a3 * r.d3) -
           2.0 * opa * c * r.b3 * r.c1 * r.t * (r.c1 * opa + 2.0 * r.a1 * r.a3 * r.c3);
  S t1 = detail::checked_div(-r.a1 * opa * num1, den, value(r.t), "quasi a3' denominator");
  S t2 = detail::checked_div(2.0 * r.a1 * r.a1 * num2, den, value(r.t), "quasi a3' denominator");
  S t3 = detail::checked_div(num3, r.a1 * den, value(r.t), "quasi a3' denominator");
  return t1 + t2 + t3;
}

/// a1' of the quasi class; takes the already-computed a3' and c3'.
template <class S>
S quasi_a1_rate(const RateArgs<S>& r, const S& a3p, const S& c3p) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S den = (r.c1 * opa - r.a1 * r.a3 * r.c3) * (r.a1 + 2.0 * r.b1 * r.t);
  S num1 = r.b1 * r.c1 * (opa + 2.0 * r.a3 * a3p * r.t) +
           2.0 * opa * c * r.c3 * (r.a3 - r.b3 * r.t);
  S num2 = opa * opa * c * r.c1 + r.a1 * r.a1 * r.a1 * ((a3p - r.b3) * r.c3 + r.a3 * c3p);
  S num3 = 2.0 * r.d1 + r.a3 * (2.0 * r.b1 * r.c3 + 2.0 * r.a3 * r.d1 - a3p * r.c1) +
           2.0 * r.b1 * (a3p * r.c3 + r.a3 * c3p) * r.t;
  S t1 = detail::checked_div(r.a1 * num1, den, value(r.t), "quasi a1' denominator");
  S t2 = detail::checked_div(num2, den, value(r.t), "quasi a1' denominator");
  S t3 = detail::checked_div(r.a1 * r.a1 * num3, den, value(r.t), "quasi a1' denominator");
  return t1 - t2 - t3;
}

/// c3' forced by the vanishing of the trace form (semi class).
template <class S>
S semi_c3_rate(const RateArgs<S>& r) {
  S opa = 1.0 + r.a3 * r.a3;
  S den = r.a1 * r.c3 * (r.a3 + 2.0 * r.b3 * r.t) -
          r.c1 * (opa + 2.0 * r.a3 * r.b3 * r.t);
  S brace = r.c1p * (1.0 - r.a3 * r.a3) - 2.0 * r.a3p * r.b3 * r.c1 * r.t +
            r.a3 * (r.a3p * r.c1 + r.a1p * r.c3 - 2.0 * r.b3 * (r.c1 + r.c1p * r.t)) -
            r.a1 * r.c3 * (r.a3p - r.b3);
  S num1 = 2.0 * r.a1p * opa * r.b3 * r.c1 * r.c1 * r.t - r.a1 * r.a1 * r.c3 * brace;
  S num2 = opa * (r.b3 * r.c1 + r.a3 * r.c1p - r.a1p * r.c3) +
           2.0 * r.b3 * (r.c1p + r.a3 * (r.a3p * r.c1 + r.a3 * r.c1p + r.a1p * r.c3)) * r.t;
  S t1 = detail::checked_div(num1, r.a1 * r.a1 * den, value(r.t), "semi c3' denominator");
  S t2 = detail::checked_div(r.c1 * num2, r.a1 * den, value(r.t), "semi c3' denominator");
  return t1 - t2;
}

/// a1' in the Ricci-flat semi case.
template <class S>
S ricci_flat_a1_rate(const RateArgs<S>& r) {
  S opa = 1.0 + r.a3 * r.a3;
  S den = (r.c1 * opa - r.a1 * r.a3 * r.c3) * (r.a1 + 2.0 * r.b1 * r.t);
  S num1 = r.a3 * (r.c1 * (r.a3p - r.b3) - r.b1 * r.c3) + r.c1p -
           2.0 * r.a3p * r.b1 * r.c3 * r.t + r.c3 * (r.b3 - r.a3p);
  S num2 = 2.0 * r.c1p * r.t + r.c1 * (opa + 2.0 * r.a3 * r.a3p * r.t);
  S t1 = detail::checked_div(r.a1 * r.a1 * num1, den, value(r.t), "ricci-flat a1' denominator");
  S t2 = detail::checked_div(r.b1 * num2, den, value(r.t), "ricci-flat a1' denominator");
  return t1 + t2;
}

/// c1' of the special complex class.
template <class S>
S special_c1_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S den4 = ak_denominator(r);
  S a1cb = r.a1 * r.a1 * r.a1;
  S num1 = a1cb * (2.0 * r.a1 * r.c3 * (r.a3 + r.a3p * r.t) - r.c1 * opa -
                   4.0 * r.a1p * r.a3 * r.c3 * r.t) -
           4.0 * r.a1p * opa * opa * c * r.c1 * r.t * r.t;
  S num2 = opa * (c * r.c1 * (opa + 4.0 * r.a3 * r.a3p * r.t) +
                  r.a1 * (r.a1p * r.c1 - 2.0 * r.a3p * c * r.c3 * r.t));
  S t1 = detail::checked_div(2.0 * c * num1, r.a1 * den4, value(r.t),
                             "special c1' denominator");
  S t2 = detail::checked_div(4.0 * c * r.t * num2, den4, value(r.t), "special c1' denominator");
  return t1 - t2;
}

/// a1' of the w1+w3 class.
template <class S>
S w1w3_a1_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S den = (r.c1 * opa - r.a1 * r.a3 * r.c3) * (r.a1 + 2.0 * r.b1 * r.t);
  S num1 = r.a1 * r.a1 * r.a1 * (r.b3 - r.a3p) * r.c3 -
           opa * c * r.c1 * (opa + 2.0 * r.a3 * r.b3 * r.t);
  S num2 = r.a3 * (r.c1 * (r.a3p - r.b3) - r.b1 * r.c3) -
           2.0 * (r.d1 + r.a3p * r.b1 * r.c3 * r.t);
  S num3 = r.b1 * r.c1 * (opa + 2.0 * r.a3 * r.a3p * r.t) +
           c * r.c3 * (r.a3 * opa - 2.0 * r.b3 * r.t * (1.0 - r.a3 * r.a3));
  S t1 = detail::checked_div(num1, den, value(r.t), "w1+w3 a1' denominator");
  S t2 = detail::checked_div(r.a1 * r.a1 * num2, den, value(r.t), "w1+w3 a1' denominator");
  S t3 = detail::checked_div(r.a1 * num3, den, value(r.t), "w1+w3 a1' denominator");
  return t1 + t2 + t3;
}

/// a3' of the w1+w3 class.
template <class S>
S w1w3_a3_rate(const RateArgs<S>& r) {
  const double c = r.curv;
  S opa = 1.0 + r.a3 * r.a3;
  S den = (opa * r.c1 * r.c1 - r.a1 * r.c3 * (2.0 * r.a3 * r.c1 + r.a1 * r.c3)) *
          (r.a1 + 2.0 * r.b1 * r.t) * r.a1;
  S a1q = r.a1 * r.a1 * r.a1 * r.a1;
  S num1 = a1q * r.c3 * (r.b3 * r.c3 - 2.0 * r.a3 * r.d3) -
           2.0 * opa * r.b3 * c * r.c1 * r.t * (opa * r.c1 + 4.0 * r.a1 * r.a3 * r.c3);
  S num2 = r.b3 * (r.c1 * r.c1 + 2.0 * c * r.c3 * r.c3 * r.t + 4.0 * r.c1 * r.d1 * r.t) +
           2.0 * r.c1 * (r.a3 * r.d1 - r.b1 * (r.c3 + 2.0 * r.d3 * r.t));
  S num3 = r.c1 * r.d3 - r.c3 * r.d1 + r.a3 * r.a3 * (r.c3 * r.d1 + r.c1 * r.d3) -
           r.a3 * r.c3 * (r.b1 * (r.c3 + 2.0 * r.d3 * r.t) - 2.0 * r.b3 * r.d1 * r.t);
  S t1 = detail::checked_div(num1, den, value(r.t), "w1+w3 a3' denominator");
  S t2 = detail::checked_div(r.a1 * r.a1 * opa * num2, den, value(r.t), "w1+w3 a3' denominator");
  S t3 = detail::checked_div(2.0 * r.a1 * r.a1 * r.a1 * num3, den, value(r.t),
                             "w1+w3 a3' denominator");
  return t1 - t2 + t3;
}

}  // namespace norden

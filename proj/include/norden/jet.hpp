#pragma once

#include <cmath>
#include <ostream>

#include "norden/errors.hpp"

namespace norden {

// Smallest denominator magnitude we divide by. Every structure theorem in
// this domain comes with explicit non-vanishing conditions, so a vanishing
// denominator is a reportable event, not a NaN.
inline constexpr double kMinDivisor = 1e-12;

/// First-order jet (value, d/dt). Arithmetic follows the exact product,
/// quotient and chain rules, so polynomial expressions propagate derivatives
/// without truncation error.
struct Jet1 {
  double v = 0.0;  // value
  double d = 0.0;  // first derivative

  constexpr Jet1() = default;
  constexpr Jet1(double value) : v(value), d(0.0) {}
  constexpr Jet1(double value, double deriv) : v(value), d(deriv) {}

  friend constexpr Jet1 operator+(Jet1 a) { return a; }
  friend constexpr Jet1 operator-(Jet1 a) { return {-a.v, -a.d}; }

  friend constexpr Jet1 operator+(Jet1 a, Jet1 b) { return {a.v + b.v, a.d + b.d}; }
  friend constexpr Jet1 operator-(Jet1 a, Jet1 b) { return {a.v - b.v, a.d - b.d}; }
  friend constexpr Jet1 operator*(Jet1 a, Jet1 b) {
    return {a.v * b.v, a.v * b.d + a.d * b.v};
  }
  friend Jet1 operator/(Jet1 a, Jet1 b) {
    if (std::abs(b.v) < kMinDivisor)
      throw DenominatorError(0.0, "jet division by vanishing value");
    double q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }

  Jet1& operator+=(Jet1 b) { return *this = *this + b; }
  Jet1& operator-=(Jet1 b) { return *this = *this - b; }
  Jet1& operator*=(Jet1 b) { return *this = *this * b; }
  Jet1& operator/=(Jet1 b) { return *this = *this / b; }

  friend constexpr bool operator==(Jet1 a, Jet1 b) { return a.v == b.v && a.d == b.d; }

  friend std::ostream& operator<<(std::ostream& os, Jet1 a) {
    return os << "(" << a.v << ", " << a.d << ")";
  }
};

inline Jet1 sqrt(Jet1 a) {
  if (a.v < 0.0) throw DomainError(a.v, "sqrt of negative jet value");
  double r = std::sqrt(a.v);
  if (r < kMinDivisor) throw DenominatorError(0.0, "sqrt jet derivative singular at 0");
  return {r, a.d / (2.0 * r)};
}

inline Jet1 exp(Jet1 a) {
  double e = std::exp(a.v);
  return {e, e * a.d};
}

inline Jet1 log(Jet1 a) {
  if (a.v <= 0.0) throw DomainError(a.v, "log of non-positive jet value");
  return {std::log(a.v), a.d / a.v};
}

// Integer power; supports any base including zero and negatives.
inline Jet1 ipow(Jet1 a, long n) {
  if (n == 0) return Jet1(1.0);
  if (n < 0) return Jet1(1.0) / ipow(a, -n);
  Jet1 r(1.0);
  for (long i = 0; i < n; ++i) r = r * a;
  return r;
}

inline Jet1 pow(Jet1 a, double p) {
  double rp = std::round(p);
  if (std::abs(p - rp) < 1e-15 && std::abs(rp) < 64) return ipow(a, static_cast<long>(rp));
  if (a.v <= 0.0) throw DomainError(a.v, "pow with non-positive base and non-integer exponent");
  double w = std::pow(a.v, p);
  return {w, p * std::pow(a.v, p - 1.0) * a.d};
}

inline double value(double x) { return x; }
inline double value(Jet1 x) { return x.v; }

}  // namespace norden

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "norden/errors.hpp"
#include "norden/jet.hpp"

namespace norden {

/// Truncated Taylor series at an (implicit) expansion point:
/// coeff[k] = f^(k)/k!. Order = coeff.size() - 1. All operations are the
/// standard power-series recurrences, exact through the kept order.
class Taylor {
 public:
  Taylor() : c_(1, 0.0) {}
  explicit Taylor(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.assign(1, 0.0);
  }
  static Taylor constant(double v, int order) {
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    c[0] = v;
    return Taylor(std::move(c));
  }
  // The local variable s (so that f(t0 + s) = t0 + s).
  static Taylor variable(double t0, int order) {
    Taylor t = constant(t0, order);
    if (order >= 1) t.c_[1] = 1.0;
    return t;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const {
    return k <= order() ? c_[static_cast<std::size_t>(k)] : 0.0;
  }
  double value() const { return c_[0]; }
  // k-th derivative (not the raw coefficient).
  double deriv(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return (*this)[k] * f;
  }
  Jet1 jet() const { return {c_[0], (*this)[1]}; }

  const std::vector<double>& coeffs() const { return c_; }

  friend Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r = Taylor::constant(0.0, std::max(a.order(), b.order()));
    for (int k = 0; k <= r.order(); ++k) r.c_[k] = a[k] + b[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a, const Taylor& b) {
    Taylor r = Taylor::constant(0.0, std::max(a.order(), b.order()));
    for (int k = 0; k <= r.order(); ++k) r.c_[k] = a[k] - b[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a) {
    Taylor r = a;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    int n = std::max(a.order(), b.order());
    Taylor r = Taylor::constant(0.0, n);
    for (int k = 0; k <= n; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    if (std::abs(b[0]) < kMinDivisor)
      throw DenominatorError(0.0, "series division by vanishing value");
    int n = std::max(a.order(), b.order());
    Taylor r = Taylor::constant(0.0, n);
    for (int k = 0; k <= n; ++k) {
      double s = a[k];
      for (int j = 1; j <= k; ++j) s -= b[j] * r.c_[k - j];
      r.c_[k] = s / b[0];
    }
    return r;
  }
  friend Taylor operator+(const Taylor& a, double s) { return a + Taylor::constant(s, a.order()); }
  friend Taylor operator+(double s, const Taylor& a) { return a + s; }
  friend Taylor operator-(const Taylor& a, double s) { return a - Taylor::constant(s, a.order()); }
  friend Taylor operator-(double s, const Taylor& a) { return Taylor::constant(s, a.order()) - a; }
  friend Taylor operator*(const Taylor& a, double s) {
    Taylor r = a;
    for (auto& x : r.c_) x *= s;
    return r;
  }
  friend Taylor operator*(double s, const Taylor& a) { return a * s; }
  friend Taylor operator/(const Taylor& a, double s) { return a * (1.0 / s); }
  friend Taylor operator/(double s, const Taylor& a) {
    return Taylor::constant(s, a.order()) / a;
  }

  /// Series of the derivative f'; one order shorter.
  Taylor derivative() const {
    int n = std::max(order() - 1, 0);
    Taylor r = Taylor::constant(0.0, n);
    for (int k = 0; k <= n; ++k) r.c_[k] = (*this)[k + 1] * (k + 1);
    return r;
  }

  /// Divide by the local variable s (valid only when c[0] ~ 0); shifts
  /// coefficients down one slot. This is the series form of l'Hopital.
  Taylor shifted_down() const {
    int n = std::max(order() - 1, 0);
    Taylor r = Taylor::constant(0.0, n);
    for (int k = 0; k <= n; ++k) r.c_[k] = (*this)[k + 1];
    return r;
  }

  /// Re-center the truncated polynomial at s = dt (Taylor shift).
  Taylor shift_to(double dt) const {
    Taylor r = *this;
    int n = r.order();
    // synthetic division applied repeatedly
    for (int j = 0; j < n; ++j)
      for (int k = n - 1; k >= j; --k) r.c_[k] += dt * r.c_[k + 1];
    return r;
  }

  double eval_poly(double s) const {
    double acc = 0.0;
    for (int k = order(); k >= 0; --k) acc = acc * s + c_[static_cast<std::size_t>(k)];
    return acc;
  }

  Taylor truncated(int n) const {
    Taylor r = Taylor::constant(0.0, n);
    for (int k = 0; k <= n; ++k) r.c_[k] = (*this)[k];
    return r;
  }

 private:
  std::vector<double> c_;
};

inline Taylor sqrt(const Taylor& a) {
  if (a[0] < 0.0) throw DomainError(a[0], "sqrt of negative series value");
  if (a[0] < kMinDivisor) throw DenominatorError(0.0, "sqrt series singular at 0");
  int n = a.order();
  Taylor r = Taylor::constant(0.0, n);
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = std::sqrt(a[0]);
  for (int k = 1; k <= n; ++k) {
    double s = a[k];
    for (int j = 1; j < k; ++j) s -= c[j] * c[k - j];
    c[k] = s / (2.0 * c[0]);
  }
  return Taylor(std::move(c));
}

inline Taylor exp(const Taylor& a) {
  int n = a.order();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = std::exp(a[0]);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * c[k - j];
    c[k] = s / k;
  }
  return Taylor(std::move(c));
}

inline Taylor log(const Taylor& a) {
  if (a[0] <= 0.0) throw DomainError(a[0], "log of non-positive series value");
  int n = a.order();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = std::log(a[0]);
  for (int k = 1; k <= n; ++k) {
    double s = k * a[k];
    for (int j = 1; j < k; ++j) s -= j * c[j] * a[k - j];
    c[k] = s / (k * a[0]);
  }
  return Taylor(std::move(c));
}

inline Taylor ipow(const Taylor& a, long p) {
  if (p == 0) return Taylor::constant(1.0, a.order());
  if (p < 0) return Taylor::constant(1.0, a.order()) / ipow(a, -p);
  Taylor r = Taylor::constant(1.0, a.order());
  for (long i = 0; i < p; ++i) r = r * a;
  return r;
}

inline Taylor pow(const Taylor& a, double p) {
  double rp = std::round(p);
  if (std::abs(p - rp) < 1e-15 && std::abs(rp) < 64) return ipow(a, static_cast<long>(rp));
  if (a[0] <= 0.0)
    throw DomainError(a[0], "pow with non-positive base and non-integer exponent");
  return exp(log(a) * p);
}

}  // namespace norden

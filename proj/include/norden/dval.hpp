#pragma once

#include <cassert>
#include <cmath>
#include <vector>

#include "norden/errors.hpp"

namespace norden {

/// Forward-mode dual number carrying a full gradient with respect to the 2n
/// bundle coordinates (x^1..x^n, y^1..y^n). Every tensor assembled from these
/// therefore comes with exact first coordinate derivatives; no numerical
/// differentiation enters the pipeline.
class DVal {
 public:
  DVal() : v_(0.0) {}
  DVal(double v) : v_(0.0) { v_ = v; }  // gradient-free constant
  DVal(double v, std::vector<double> grad) : v_(v), g_(std::move(grad)) {}
  static DVal seed(double v, int nvars, int index) {
    std::vector<double> g(static_cast<std::size_t>(nvars), 0.0);
    g[static_cast<std::size_t>(index)] = 1.0;
    return DVal(v, std::move(g));
  }
  static DVal with_grad(double v, std::vector<double> grad) { return DVal(v, std::move(grad)); }

  double value() const { return v_; }
  int nvars() const { return static_cast<int>(g_.size()); }
  double partial(int i) const {
    return i < nvars() ? g_[static_cast<std::size_t>(i)] : 0.0;
  }
  const std::vector<double>& grad() const { return g_; }

  friend DVal operator-(const DVal& a) {
    DVal r = a;
    r.v_ = -r.v_;
    for (auto& x : r.g_) x = -x;
    return r;
  }

  friend DVal operator+(const DVal& a, const DVal& b) {
    DVal r = widen(a, b);
    r.v_ = a.v_ + b.v_;
    for (std::size_t i = 0; i < r.g_.size(); ++i)
      r.g_[i] = gat(a, i) + gat(b, i);
    return r;
  }
  friend DVal operator-(const DVal& a, const DVal& b) {
    DVal r = widen(a, b);
    r.v_ = a.v_ - b.v_;
    for (std::size_t i = 0; i < r.g_.size(); ++i)
      r.g_[i] = gat(a, i) - gat(b, i);
    return r;
  }
  friend DVal operator*(const DVal& a, const DVal& b) {
    DVal r = widen(a, b);
    r.v_ = a.v_ * b.v_;
    for (std::size_t i = 0; i < r.g_.size(); ++i)
      r.g_[i] = a.v_ * gat(b, i) + gat(a, i) * b.v_;
    return r;
  }
  friend DVal operator/(const DVal& a, const DVal& b) {
    if (std::abs(b.v_) < 1e-300) throw DenominatorError(0.0, "dual division by zero");
    DVal r = widen(a, b);
    double inv = 1.0 / b.v_;
    r.v_ = a.v_ * inv;
    for (std::size_t i = 0; i < r.g_.size(); ++i)
      r.g_[i] = (gat(a, i) - r.v_ * gat(b, i)) * inv;
    return r;
  }

  DVal& operator+=(const DVal& b) { return *this = *this + b; }
  DVal& operator-=(const DVal& b) { return *this = *this - b; }
  DVal& operator*=(const DVal& b) { return *this = *this * b; }

  friend DVal sqrt(const DVal& a) {
    if (a.v_ < 0.0) throw DomainError(a.v_, "sqrt of negative dual value");
    double rv = std::sqrt(a.v_);
    DVal r = a;
    r.v_ = rv;
    double f = 0.5 / rv;
    for (auto& x : r.g_) x *= f;
    return r;
  }

 private:
  static std::size_t gsize(const DVal& a) { return a.g_.size(); }
  static double gat(const DVal& a, std::size_t i) { return i < a.g_.size() ? a.g_[i] : 0.0; }
  static DVal widen(const DVal& a, const DVal& b) {
    DVal r;
    r.g_.assign(std::max(gsize(a), gsize(b)), 0.0);
    return r;
  }

  double v_;
  std::vector<double> g_;
};

inline double scalar_magnitude(const DVal& x) { return std::abs(x.value()); }
inline double value(const DVal& x) { return x.value(); }

}  // namespace norden

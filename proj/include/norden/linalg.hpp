#pragma once

#include <cassert>
#include <cmath>
#include <vector>

#include "norden/errors.hpp"

namespace norden {

inline double scalar_magnitude(double x) { return std::abs(x); }

/// Dense row-major matrix over any ring-like scalar (double, Jet1, DVal).
template <class T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  Mat(int rows, int cols, const T& fill)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n, T(0.0));
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  Mat transposed() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Mat block(int i0, int j0, int nr, int nc) const {
    Mat r(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r(i, j) = (*this)(i0 + i, j0 + j);
    return r;
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    Mat r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] + b.a_[k];
    return r;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] - b.a_[k];
    return r;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    assert(a.cols_ == b.rows_);
    Mat r(a.rows_, b.cols_, T(0.0));
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        for (int j = 0; j < b.cols_; ++j) r(i, j) = r(i, j) + aik * b(k, j);
      }
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : a_) m = std::max(m, scalar_magnitude(x));
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<T> a_;
};

/// Gauss-Jordan inverse with partial pivoting on scalar magnitude.
/// Throws DegenerateError when a pivot is smaller than rel_tol times the
/// matrix scale.
template <class T>
Mat<T> inverse(Mat<T> a, double rel_tol = 1e-12) {
  const int n = a.rows();
  assert(a.cols() == n);
  const double scale = std::max(a.max_abs(), 1e-300);
  Mat<T> inv = Mat<T>::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = scalar_magnitude(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      double m = scalar_magnitude(a(r, col));
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    if (best < rel_tol * scale) throw DegenerateError("matrix numerically singular");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    T d = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) / d;
      inv(col, j) = inv(col, j) / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      T f = a(r, col);
      if (scalar_magnitude(f) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Rank-3 array indexed [i][j][k] with uniform dimension n.
template <class T>
class Tens3 {
 public:
  Tens3() : n_(0) {}
  explicit Tens3(int n, const T& fill = T(0.0))
      : n_(n), a_(static_cast<std::size_t>(n) * n * n, fill) {}
  int dim() const { return n_; }
  T& operator()(int i, int j, int k) {
    return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }
  const T& operator()(int i, int j, int k) const {
    return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : a_) m = std::max(m, scalar_magnitude(x));
    return m;
  }

 private:
  int n_;
  std::vector<T> a_;
};

/// Rank-4 array indexed [h][i][j][k] with uniform dimension n.
template <class T>
class Tens4 {
 public:
  Tens4() : n_(0) {}
  explicit Tens4(int n, const T& fill = T(0.0))
      : n_(n), a_(static_cast<std::size_t>(n) * n * n * n, fill) {}
  int dim() const { return n_; }
  T& operator()(int h, int i, int j, int k) {
    return a_[((static_cast<std::size_t>(h) * n_ + i) * n_ + j) * n_ + k];
  }
  const T& operator()(int h, int i, int j, int k) const {
    return a_[((static_cast<std::size_t>(h) * n_ + i) * n_ + j) * n_ + k];
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : a_) m = std::max(m, scalar_magnitude(x));
    return m;
  }

 private:
  int n_;
  std::vector<T> a_;
};

}  // namespace norden

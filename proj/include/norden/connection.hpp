#pragma once

#include <span>

#include "norden/lift.hpp"

namespace norden {

/// Coordinate data of the lifted metric at one point: components, their
/// first coordinate derivatives (exact, via dual numbers), and the
/// Christoffel symbols of G.
struct ConnectionData {
  int n = 0;
  Mat<double> G_co;        // 2n x 2n
  Tens3<double> dG_co;     // (l, A, B) = d G_AB / d u^l
  Tens3<double> gammaG;    // (A, B, C) = Gamma^A_{BC}
  double metricity_residual = 0.0;
};

/// F(X,Y,Z) = G((nabla_X J) Y, Z) in the adapted frame. Component naming:
/// slot letter X = horizontal (delta_i), Y = vertical (d/dy_i).
struct FTensor {
  int n = 0;
  Tens3<double> F;  // adapted indices, dimension 2n

  double component(char s1, char s2, char s3, int i, int j, int k) const {
    auto idx = [this](char s, int m) { return s == 'X' ? m : n + m; };
    return F(idx(s1, i), idx(s2, j), idx(s3, k));
  }
  double max_abs() const { return F.max_abs(); }

  /// max |F(a,b,c) - F(a,c,b)|
  double symmetry_last_two() const;
  /// max |F(a,b,c) - F(a,Jb,Jc)| for the given adapted J
  double symmetry_J_pair(const Mat<double>& J_ad) const;
};

/// The trace 1-form of F against the inverse metric blocks. Components are
/// adapted: first n entries Phi(delta_k), last n entries Phi(d/dy_k).
struct PhiForm {
  int n = 0;
  std::vector<double> comp;  // 2n

  double max_abs() const;
  /// Proportionality factor rho with Phi(delta_k) ~ rho * g_0k, and the
  /// relative residual of the horizontal part after projecting onto g_0.
  double horizontal_factor = 0.0;
  double horizontal_off_residual = 0.0;
};

/// Everything the classifiers need at one tangent point.
struct PointTensors {
  int n = 0;
  AdaptedFrame frame;
  FTensor F;
  PhiForm phi;
  Tens3<double> nijenhuis;       // coordinate components N^A_{BC}
  double nijenhuis_scale = 0.0;  // largest bracket term entering N
  double metricity_residual = 0.0;
};

ConnectionData christoffels_of_G(const CoefficientFamily& fam, const SpaceForm& sf,
                                 const TangentPoint& p);
FTensor f_tensor_at(const CoefficientFamily& fam, const SpaceForm& sf, const TangentPoint& p);
PhiForm phi_at(const CoefficientFamily& fam, const SpaceForm& sf, const TangentPoint& p);
Tens3<double> nijenhuis_at(const CoefficientFamily& fam, const SpaceForm& sf,
                           const TangentPoint& p);

/// One-pass computation of frame, F, Phi and Nijenhuis (shared assembly).
PointTensors point_tensors(const CoefficientFamily& fam, const SpaceForm& sf,
                           const TangentPoint& p);

/// Same pipeline with the twelve coefficients frozen as pointwise jets
/// (the chain rule through t(x, y) uses the stored derivatives).
PointTensors point_tensors_with(const CoeffJets& jets, const SpaceForm& sf,
                                const TangentPoint& p);

/// Values-only coordinate components of J and G at arbitrary (x, y);
/// the finite-difference oracle for the dual-number derivatives.
void coordinate_JG_values(const CoefficientFamily& fam, const SpaceForm& sf,
                          std::span<const double> x, std::span<const double> y,
                          Mat<double>& J_co, Mat<double>& G_co);

/// Exact coordinate derivatives of J and G from the dual-number assembly:
/// dJ(l,A,B) = d J^A_B / d u^l and likewise for G.
void coordinate_JG_derivatives(const CoefficientFamily& fam, const SpaceForm& sf,
                               const TangentPoint& p, Tens3<double>& dJ, Tens3<double>& dG);

}  // namespace norden

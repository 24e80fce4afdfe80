#pragma once

#include <span>
#include <vector>

#include "norden/linalg.hpp"

namespace norden {

/// Constant-curvature Riemannian base (M, g) in the conformal chart
///   g_ij(x) = delta_ij / (1 + (c/4)|x|^2)^2,
/// which has closed forms for g, Christoffel symbols and their first
/// coordinate derivatives for any sign of c. Chart domain: 1 + (c/4)|x|^2 > 0.
struct SpaceForm {
  int n = 2;       // dimension, >= 2
  double c = 0.0;  // constant sectional curvature
};

/// Everything the lift needs at one base point.
struct BasePointData {
  std::vector<double> x;
  Mat<double> g;       // n x n
  Mat<double> g_inv;   // n x n
  Tens3<double> dg;    // dg(l,i,j)     = d g_ij / d x^l
  Tens3<double> gamma;  // gamma(h,k,i)  = Gamma^h_{ki}
  Tens4<double> dgamma;  // dgamma(l,h,k,i) = d Gamma^h_{ki} / d x^l
};

/// Closed-form chart data; throws DomainError when x leaves the chart.
BasePointData metric_at(const SpaceForm& sf, std::span<const double> x);

/// Curvature tensor R^h_{kij} from gamma and dgamma via the standard
/// coordinate formula.
Tens4<double> curvature_at(const SpaceForm& sf, std::span<const double> x);

/// Ricci tensor (contraction of the curvature); equals c(n-1) g here.
Mat<double> ricci_at(const SpaceForm& sf, std::span<const double> x);

/// Max |R_computed - c(delta g - delta g)| over all components.
double curvature_residual(const SpaceForm& sf, std::span<const double> x);

}  // namespace norden

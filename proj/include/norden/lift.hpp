#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "norden/linalg.hpp"
#include "norden/scalarfn.hpp"
#include "norden/spaceform.hpp"

namespace norden {

// Below this energy density the explicit /2t in the completed coefficients
// is evaluated by series continuation from t = 0 instead of direct division.
inline constexpr double kSmallT = 1e-4;

/// The twelve coefficient values and first derivatives at a fixed t.
struct CoeffJets {
  Jet1 a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3;
};

/// The eight free functions a completed family was built from (kept so
/// witnesses can perturb one and re-derive the dependent coefficients).
struct NordenSeeds {
  ScalarFn a1, a3, b1, b3, c1, c3, d1, d3;
};

/// The twelve functions of the energy density defining the lifted pair
/// (J, G). The companion coefficients a4 = -a3, b4 = -b3 are implicit.
class CoefficientFamily {
 public:
  ScalarFn a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3;

  std::string name;
  double curvature = 0.0;  // base curvature the family was built for
  double t_max = 2.0;      // working domain [0, t_max)
  bool analytic = true;    // false when any coefficient is an ODE table
  std::shared_ptr<const NordenSeeds> seeds;  // set by complete_norden

  CoeffJets jets_at(double t) const;

  const ScalarFn& coefficient(const std::string& key) const;  // "a1".."d3"
  CoefficientFamily with_coefficient(const std::string& key, ScalarFn fn) const;
  /// Additive perturbation of one coefficient (witness construction).
  CoefficientFamily perturbed(const std::string& key, double delta) const;
  /// Multiplicative perturbation of one coefficient.
  CoefficientFamily scaled(const std::string& key, double factor) const;

  static const std::array<const char*, 12>& coefficient_keys();
};

/// Point of TM: base coordinates, fiber coordinates, and the derived energy
/// density t = (1/2) g_ik(x) y^i y^k.
struct TangentPoint {
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;
};

TangentPoint make_tangent_point(const SpaceForm& sf, std::vector<double> x,
                                std::vector<double> y);

/// J, G and H = G^{-1} in the adapted frame (delta_1..delta_n,
/// dy_1..dy_n) at one tangent point, with the blocks of H:
/// H1 = horizontal-horizontal, H2 = vertical-vertical, H3 = mixed.
struct AdaptedFrame {
  int n = 0;
  Mat<double> J;   // 2n x 2n
  Mat<double> G;   // 2n x 2n, symmetric
  Mat<double> H;   // 2n x 2n, inverse of G
  Mat<double> H1, H2, H3;  // n x n blocks of H
};

AdaptedFrame frame_at(const CoefficientFamily& fam, const SpaceForm& sf,
                      const TangentPoint& p);

/// Same assembly from twelve fixed coefficient jets (no family needed).
AdaptedFrame frame_from_jets(const CoeffJets& jets, const SpaceForm& sf,
                             const TangentPoint& p);

/// Residuals of the almost-complex and anti-Hermitian coefficient
/// constraints, sampled over t.
struct ConstraintReport {
  struct Entry {
    std::string name;
    double max_residual = 0.0;
  };
  std::vector<Entry> entries;        // the four equational constraints
  double max_residual = 0.0;         // over the four
  double min_nondegeneracy = 0.0;    // min |det| of the two 2x2 pairings
  bool pass(double tol) const {
    return max_residual < tol && min_nondegeneracy > 1e-9;
  }
};

ConstraintReport check_family(const CoefficientFamily& fam, std::span<const double> samples);

/// max ||J^2 + I|| and max ||J^T G J + G|| over the given tangent points.
struct FrameResiduals {
  double j_squared = 0.0;
  double norden = 0.0;
};
FrameResiduals frame_residuals(const CoefficientFamily& fam, const SpaceForm& sf,
                               std::span<const TangentPoint> points);

/// Build a full Norden family from the free half (a1, a3, b1, b3, c1, c3,
/// d1, d3): a2, b2 from the almost-complex constraints, c2, d2 from the
/// anti-Hermitian ones. The /2t in b2 and d2 is regular at t = 0 and is
/// evaluated by series continuation there.
CoefficientFamily complete_norden(std::string name, ScalarFn a1, ScalarFn a3,
                                  ScalarFn b1, ScalarFn b3, ScalarFn c1, ScalarFn c3,
                                  ScalarFn d1, ScalarFn d3, double curvature,
                                  double t_max, bool analytic = true);

/// Scan [0, t_max) for a zero of f; throws DenominatorError locating the
/// crossing. Used on the structural denominators of the family builders.
void require_nonvanishing_on(const ScalarFn& f, double t_max, const char* what);

/// Jet-level version of the same completion at a single t >= kSmallT
/// (used where the coefficients exist only as pointwise jets).
struct NordenSeedJets {
  Jet1 a1, a3, b1, b3, c1, c3, d1, d3;
};
CoeffJets complete_norden_jets(const NordenSeedJets& seed, double t);

/// Change of frame at p: columns of the returned matrix are the adapted
/// basis vectors expressed in the coordinate frame (dx_1..dx_n, dy_1..dy_n).
Mat<double> adapted_frame_matrix(const BasePointData& bp, std::span<const double> y);
Mat<double> adapted_frame_matrix_inverse(const BasePointData& bp, std::span<const double> y);

/// Frame conversions for (1,1) and (0,2) tensors and (0,3) multilinear forms.
Mat<double> adapted_to_coordinate_11(const Mat<double>& P, const Mat<double>& Pinv,
                                     const Mat<double>& ad);
Mat<double> coordinate_to_adapted_11(const Mat<double>& P, const Mat<double>& Pinv,
                                     const Mat<double>& co);
Mat<double> adapted_to_coordinate_02(const Mat<double>& Pinv, const Mat<double>& ad);
Mat<double> coordinate_to_adapted_02(const Mat<double>& P, const Mat<double>& co);
Tens3<double> coordinate_to_adapted_03(const Mat<double>& P, const Tens3<double>& co);
Tens3<double> adapted_to_coordinate_03(const Mat<double>& Pinv, const Tens3<double>& ad);

}  // namespace norden

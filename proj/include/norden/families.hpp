#pragma once

#include <map>
#include <span>
#include <string>

#include "norden/classify.hpp"
#include "norden/lift.hpp"

namespace norden {

/// J-part coefficients with the b's forced by integrability of J on a base
/// of constant curvature c.
struct JPart {
  ScalarFn a1, a2, a3, b1, b2, b3;
};

/// b1, b2, b3 from the integrability conditions, given free a1, a3 and the
/// base curvature. Throws DenominatorError when the shared structural
/// denominator a1 - 2t a1' - 2ct a2 - 4ct^2 a2' crosses zero on the domain.
JPart integrable_family(ScalarFn a1, ScalarFn a3, double curvature, double t_max);

/// Flat base, J the canonical block rotation, G the split metric
/// diag(c1 g, -c1 g); everything constant in t.
CoefficientFamily trivial_flat(double c1 = 1.0);

/// Closed-form diagonal family: a1 = sqrt(B + 2ct), b1 = 0,
/// c1 = A(B + 2ct), d1 = -cA. For c < 0 the domain is the tube t < -B/2c.
CoefficientFamily diagonal_ak(double A, double B, double curvature);

/// Free half (a1, a3, b1, b3, c1, c3, d1, d3) with the rest completed;
/// generically lies in no class smaller than the full one.
CoefficientFamily generic_norden(std::string name, ScalarFn a1, ScalarFn a3, ScalarFn b1,
                                 ScalarFn b3, ScalarFn c1, ScalarFn c3, ScalarFn d1,
                                 ScalarFn d3, double curvature, double t_max);

/// Integrable J (b's from integrable_family) with free metric half; the
/// complex-structure witness family.
CoefficientFamily integrable_norden(std::string name, ScalarFn a1, ScalarFn a3, ScalarFn c1,
                                    ScalarFn c3, ScalarFn d1, ScalarFn d3, double curvature,
                                    double t_max);

/// The parallel-structure (F = 0) family: free a1, a3; c1, c3 integrated
/// from their closed-form derivative laws; d1 = c*c2, d3 = (a3'c1 - a1'c3)/a1.
CoefficientFamily ak_family(ScalarFn a1, ScalarFn a3, double c1_0, double c3_0,
                            double curvature, double t_max, double step);

/// The conformal family: integrable J with d1, d3 of the conformal shape.
CoefficientFamily conformal_ak_family(ScalarFn a1, ScalarFn a3, ScalarFn c1, ScalarFn c3,
                                      double curvature, double t_max);

/// Seed for the quasi (cyclic-identity) family: free b1, b3 and initial
/// values of the six integrated coefficients.
struct QuasiSeed {
  ScalarFn b1, b3;
  double a1_0 = 1.0, a3_0 = 0.0;
  double c1_0 = 1.0, c3_0 = 0.0;
  double d1_0 = 0.0, d3_0 = 0.0;
};

struct QuasiResult {
  CoefficientFamily family;
  double omega3_residual = 0.0;  // measured on sample points, never assumed
};

/// Integrates the printed derivative laws for a1, a3, c1, c3, d1; d3' is
/// recovered at each step by least squares on the cyclic-identity defect
/// (the closed form is not available). Membership is reported as the
/// achieved residual.
QuasiResult quasi_ak_family(const QuasiSeed& seed, const SpaceForm& sf, double t_max,
                            double step);

/// Necessary conditions of the semi / special / w1+w3 classes, evaluated as
/// |actual derivative - printed formula| at sample t values.
enum class NecessaryId { SemiC3, RicciFlatA1, SpecialC1, W1W3A1, W1W3A3 };

struct NecessaryReport {
  NecessaryId id;
  double max_residual = 0.0;
  int samples_used = 0;
  int samples_excluded = 0;  // denominator condition violated
};

NecessaryReport check_necessary(NecessaryId id, const CoefficientFamily& fam,
                                const SpaceForm& sf, std::span<const double> samples);

/// Config-facing description of a family; `kind` selects the constructor.
struct FamilySpec {
  std::string kind = "trivial-flat";
  double A = 1.0, B = 1.0;
  std::string a1 = "1", a3 = "0", b1 = "0", b3 = "0";
  std::string c1 = "1", c3 = "0", d1 = "0", d3 = "0";
  double a1_0 = 1.0, a3_0 = 0.0, c1_0 = 1.0, c3_0 = 0.0, d1_0 = 0.0, d3_0 = 0.0;
  double t_max = 1.0;
  double step = 1e-3;
  // curvature used when deriving the integrability b's; NaN = base curvature
  // (a mismatch is the standard non-integrable witness)
  double b_curvature = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, std::string> coeffs;  // custom kind: all twelve

  struct Perturbation {
    std::string key;
    double add = 0.0;
    double scale = 1.0;
    bool recomplete = false;  // re-derive the dependent coefficients
  };
  std::vector<Perturbation> perturb;
};

CoefficientFamily build_family(const FamilySpec& spec, const SpaceForm& sf);

/// Rebuild a completed family with one of its eight free coefficients
/// perturbed, re-deriving a2, b2, c2, d2 (keeps the family in the full
/// class; used by the theorem witnesses).
CoefficientFamily perturb_seed(const CoefficientFamily& fam, const std::string& key,
                               double delta);

}  // namespace norden

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "norden/connection.hpp"

namespace norden {

/// The eight structure classes, ordered so that index comparisons never
/// imply inclusion; the lattice is explicit in class_includes().
enum class NordenClass { AK, W1, W2, W3, W1W2, W1W3, W2W3, W1W2W3 };

const char* class_name(NordenClass c);
/// True when membership in `sub` implies membership in `super`.
bool class_includes(NordenClass sub, NordenClass super);

enum class Verdict { Member, NotMember, Inconclusive };
const char* verdict_name(Verdict v);

/// Residuals and three-way verdicts for the eight classes.
struct ClassReport {
  struct Entry {
    NordenClass cls;
    double residual = 0.0;
    Verdict verdict = Verdict::Inconclusive;
  };
  std::vector<Entry> entries;  // always 8, fixed order of NordenClass
  int sample_count = 0;
  double tol_member = 1e-6;
  double tol_reject = 1e-3;
  double nijenhuis_residual = 0.0;
  // set instead of verdicts when raw residuals violate the class lattice
  std::optional<std::string> inconsistency;

  const Entry& entry(NordenClass c) const;
  bool member(NordenClass c) const { return entry(c).verdict == Verdict::Member; }
};

/// Per-identity residuals accumulated over points and adapted-basis
/// triples. Each residual is max |defect| / (1 + max |constituent term|).
struct ResidualSet {
  double ak = 0.0;
  double w1 = 0.0;
  double w1w2 = 0.0;
  double w3 = 0.0;
  double w2w3 = 0.0;   // the 1-form itself
  double w1w3 = 0.0;
  double norden = 0.0;  // coefficient-constraint residual
  double nijenhuis = 0.0;
  double w2() const { return std::max(w1w2, w2w3); }
};

ResidualSet residual_set(const CoefficientFamily& fam, const SpaceForm& sf,
                         std::span<const TangentPoint> points, int threads = 1);

/// Individual residuals (each identity over all points and basis triples).
double residual_AK(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);
double residual_w1(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);
double residual_w1w2(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);
double residual_w3(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);
double residual_w2w3(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);
double residual_w2(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);
double residual_w1w3(const CoefficientFamily&, const SpaceForm&, std::span<const TangentPoint>);

/// Full classification with lattice enforcement. Membership below
/// tol_member, rejection above tol_reject, three-way in between; a member
/// subclass promotes its superclasses, and a hard violation (member
/// subclass, rejected superclass) yields an inconsistency report.
ClassReport classify(const CoefficientFamily& fam, const SpaceForm& sf,
                     std::span<const TangentPoint> points, double tol_member,
                     double tol_reject, int threads = 1);

/// Apply the lattice rules to raw verdicts: a member subclass promotes its
/// superclasses; a member subclass with a rejected superclass sets the
/// inconsistency message instead.
void enforce_lattice(ClassReport& report);

/// Defects of the cyclic identity F(X,Y,Z)+F(Y,Z,X)+F(Z,X,Y) over all
/// basis triples (used by the pointwise least-squares recovery).
void cyclic_defects(const Tens3<double>& F_ad, std::vector<double>& out);

}  // namespace norden

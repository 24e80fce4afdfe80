#include "norden/classify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <sstream>

namespace norden {

namespace {

// One point's |defect| and |constituent| maxima over the basis triples; the
// relative residual is formed per point, then maxed across points.
struct Acc {
  double defect = 0.0;
  double scale = 0.0;
  void add(double d, double s) {
    defect = std::max(defect, std::abs(d));
    scale = std::max(scale, std::abs(s));
  }
  double rel() const { return defect / (1.0 + scale); }
};

struct RawAcc {
  double ak = 0.0, w1 = 0.0, w1w2 = 0.0, w3 = 0.0, w2w3 = 0.0, w1w3 = 0.0, nij = 0.0;
  void merge(const RawAcc& o) {
    ak = std::max(ak, o.ak);
    w1 = std::max(w1, o.w1);
    w1w2 = std::max(w1w2, o.w1w2);
    w3 = std::max(w3, o.w3);
    w2w3 = std::max(w2w3, o.w2w3);
    w1w3 = std::max(w1w3, o.w1w3);
    nij = std::max(nij, o.nij);
  }
};

uint64_t splitmix64(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Exhaustive for 2n <= 12 (8n^3 <= 1728 triples); deterministic random
// subsample beyond that.
template <class Fn>
void for_each_triple(int m2, Fn&& fn) {
  const long total = static_cast<long>(m2) * m2 * m2;
  if (total <= 1728) {
    for (int a = 0; a < m2; ++a)
      for (int b = 0; b < m2; ++b)
        for (int c = 0; c < m2; ++c) fn(a, b, c);
    return;
  }
  uint64_t state = 0x243F6A8885A308D3ull;
  for (int k = 0; k < 1728; ++k) {
    uint64_t r = splitmix64(state);
    int a = static_cast<int>(r % m2);
    int b = static_cast<int>((r >> 16) % m2);
    int c = static_cast<int>((r >> 32) % m2);
    fn(a, b, c);
  }
}

void accumulate(const PointTensors& pt, RawAcc& out) {
  const int n = pt.n;
  const int m2 = 2 * n;
  const Tens3<double>& F = pt.F.F;
  const Mat<double>& G = pt.frame.G;
  const Mat<double>& J = pt.frame.J;
  const std::vector<double>& phi = pt.phi.comp;

  struct {
    Acc ak, w1, w1w2, w3, w2w3, w1w3, nij;
  } acc;

  Mat<double> GJ = G * J;
  std::vector<double> phiJ(m2, 0.0);
  for (int c = 0; c < m2; ++c)
    for (int d = 0; d < m2; ++d) phiJ[c] += phi[d] * J(d, c);

  Tens3<double> FJ(m2, 0.0);  // F(a, b, J c)
  for (int a = 0; a < m2; ++a)
    for (int b = 0; b < m2; ++b)
      for (int c = 0; c < m2; ++c) {
        double s = 0.0;
        for (int d = 0; d < m2; ++d) s += F(a, b, d) * J(d, c);
        FJ(a, b, c) = s;
      }

  for_each_triple(m2, [&](int a, int b, int c) {
    const double f = F(a, b, c);
    acc.ak.add(f, f);

    const double cyc = f + F(b, c, a) + F(c, a, b);
    acc.w3.add(cyc, std::max({std::abs(f), std::abs(F(b, c, a)), std::abs(F(c, a, b))}));

    const double cj = FJ(a, b, c) + FJ(b, c, a) + FJ(c, a, b);
    acc.w1w2.add(cj, std::max({std::abs(FJ(a, b, c)), std::abs(FJ(b, c, a)),
                               std::abs(FJ(c, a, b))}));

    // 2n F(X,Y,Z) = G(X,JY)Phi(JZ) + G(X,JZ)Phi(JY) + G(X,Y)Phi(Z) + G(X,Z)Phi(Y)
    {
      const double lhs = 2.0 * n * f;
      const double t1 = GJ(a, b) * phiJ[c];
      const double t2 = GJ(a, c) * phiJ[b];
      const double t3 = G(a, b) * phi[c];
      const double t4 = G(a, c) * phi[b];
      acc.w1.add(lhs - (t1 + t2 + t3 + t4),
                 std::max({std::abs(lhs), std::abs(t1), std::abs(t2), std::abs(t3),
                           std::abs(t4)}));
    }

    // n [cyclic F] = G Phi terms + G(.,J.) Phi(J.) terms
    {
      const double lhs = n * cyc;
      const double t1 = G(a, b) * phi[c];
      const double t2 = G(c, a) * phi[b];
      const double t3 = G(b, c) * phi[a];
      const double t4 = GJ(a, b) * phiJ[c];
      const double t5 = GJ(b, c) * phiJ[a];
      const double t6 = GJ(c, a) * phiJ[b];
      acc.w1w3.add(lhs - (t1 + t2 + t3 + t4 + t5 + t6),
                   std::max({std::abs(lhs), std::abs(t1), std::abs(t2), std::abs(t3),
                             std::abs(t4), std::abs(t5), std::abs(t6)}));
    }
  });

  for (int c = 0; c < m2; ++c) acc.w2w3.add(phi[c], phi[c]);
  double nmax = pt.nijenhuis.max_abs();
  acc.nij.add(nmax, nmax);

  RawAcc point;
  point.ak = acc.ak.rel();
  point.w1 = acc.w1.rel();
  point.w1w2 = acc.w1w2.rel();
  point.w3 = acc.w3.rel();
  point.w2w3 = acc.w2w3.rel();
  point.w1w3 = acc.w1w3.rel();
  point.nij = acc.nij.rel();
  out.merge(point);
}

RawAcc accumulate_range(const CoefficientFamily& fam, const SpaceForm& sf,
                        std::span<const TangentPoint> pts) {
  RawAcc acc;
  for (const TangentPoint& p : pts) accumulate(point_tensors(fam, sf, p), acc);
  return acc;
}

}  // namespace

const char* class_name(NordenClass c) {
  switch (c) {
    case NordenClass::AK: return "AK";
    case NordenClass::W1: return "w1";
    case NordenClass::W2: return "w2";
    case NordenClass::W3: return "w3";
    case NordenClass::W1W2: return "w1+w2";
    case NordenClass::W1W3: return "w1+w3";
    case NordenClass::W2W3: return "w2+w3";
    case NordenClass::W1W2W3: return "w1+w2+w3";
  }
  return "?";
}

bool class_includes(NordenClass sub, NordenClass super) {
  if (sub == super) return true;
  if (sub == NordenClass::AK) return true;
  if (super == NordenClass::W1W2W3) return true;
  auto in = [](NordenClass c, std::initializer_list<NordenClass> list) {
    return std::find(list.begin(), list.end(), c) != list.end();
  };
  switch (sub) {
    case NordenClass::W1: return in(super, {NordenClass::W1W2, NordenClass::W1W3});
    case NordenClass::W2: return in(super, {NordenClass::W1W2, NordenClass::W2W3});
    case NordenClass::W3: return in(super, {NordenClass::W1W3, NordenClass::W2W3});
    default: return false;
  }
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NotMember: return "not-member";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const ClassReport::Entry& ClassReport::entry(NordenClass c) const {
  return entries[static_cast<std::size_t>(c)];
}

ResidualSet residual_set(const CoefficientFamily& fam, const SpaceForm& sf,
                         std::span<const TangentPoint> points, int threads) {
  RawAcc acc;
  if (threads <= 1 || points.size() < 8) {
    acc = accumulate_range(fam, sf, points);
  } else {
    const int nchunk = std::min<int>(threads, static_cast<int>(points.size()));
    std::vector<std::future<RawAcc>> futs;
    const std::size_t per = (points.size() + nchunk - 1) / nchunk;
    for (int k = 0; k < nchunk; ++k) {
      std::size_t lo = k * per;
      if (lo >= points.size()) break;
      std::size_t hi = std::min(points.size(), lo + per);
      futs.push_back(std::async(std::launch::async, [&, lo, hi] {
        return accumulate_range(fam, sf, points.subspan(lo, hi - lo));
      }));
    }
    for (auto& f : futs) acc.merge(f.get());
  }

  ResidualSet rs;
  rs.ak = acc.ak;
  rs.w1 = acc.w1;
  rs.w1w2 = acc.w1w2;
  rs.w3 = acc.w3;
  rs.w2w3 = acc.w2w3;
  rs.w1w3 = acc.w1w3;
  rs.nijenhuis = acc.nij;

  std::set<double> ts;
  for (const TangentPoint& p : points) ts.insert(p.t);
  std::vector<double> samples(ts.begin(), ts.end());
  rs.norden = check_family(fam, samples).max_residual;
  return rs;
}

double residual_AK(const CoefficientFamily& f, const SpaceForm& s,
                   std::span<const TangentPoint> p) {
  return residual_set(f, s, p).ak;
}
double residual_w1(const CoefficientFamily& f, const SpaceForm& s,
                   std::span<const TangentPoint> p) {
  return residual_set(f, s, p).w1;
}
double residual_w1w2(const CoefficientFamily& f, const SpaceForm& s,
                     std::span<const TangentPoint> p) {
  return residual_set(f, s, p).w1w2;
}
double residual_w3(const CoefficientFamily& f, const SpaceForm& s,
                   std::span<const TangentPoint> p) {
  return residual_set(f, s, p).w3;
}
double residual_w2w3(const CoefficientFamily& f, const SpaceForm& s,
                     std::span<const TangentPoint> p) {
  return residual_set(f, s, p).w2w3;
}
double residual_w2(const CoefficientFamily& f, const SpaceForm& s,
                   std::span<const TangentPoint> p) {
  return residual_set(f, s, p).w2();
}
double residual_w1w3(const CoefficientFamily& f, const SpaceForm& s,
                     std::span<const TangentPoint> p) {
  return residual_set(f, s, p).w1w3;
}

ClassReport classify(const CoefficientFamily& fam, const SpaceForm& sf,
                     std::span<const TangentPoint> points, double tol_member,
                     double tol_reject, int threads) {
  ResidualSet rs = residual_set(fam, sf, points, threads);

  ClassReport rep;
  rep.sample_count = static_cast<int>(points.size());
  rep.tol_member = tol_member;
  rep.tol_reject = tol_reject;
  rep.nijenhuis_residual = rs.nijenhuis;

  auto residual_of = [&](NordenClass c) {
    switch (c) {
      case NordenClass::AK: return rs.ak;
      case NordenClass::W1: return rs.w1;
      case NordenClass::W2: return rs.w2();
      case NordenClass::W3: return rs.w3;
      case NordenClass::W1W2: return rs.w1w2;
      case NordenClass::W1W3: return rs.w1w3;
      case NordenClass::W2W3: return rs.w2w3;
      case NordenClass::W1W2W3: return rs.norden;
    }
    return 0.0;
  };

  static const NordenClass kAll[] = {NordenClass::AK,   NordenClass::W1,
                                     NordenClass::W2,   NordenClass::W3,
                                     NordenClass::W1W2, NordenClass::W1W3,
                                     NordenClass::W2W3, NordenClass::W1W2W3};
  for (NordenClass c : kAll) {
    ClassReport::Entry e;
    e.cls = c;
    e.residual = residual_of(c);
    e.verdict = e.residual < tol_member ? Verdict::Member
                : e.residual > tol_reject ? Verdict::NotMember
                                          : Verdict::Inconclusive;
    rep.entries.push_back(e);
  }
  enforce_lattice(rep);
  return rep;
}

void enforce_lattice(ClassReport& rep) {
  static const NordenClass kAll[] = {NordenClass::AK,   NordenClass::W1,
                                     NordenClass::W2,   NordenClass::W3,
                                     NordenClass::W1W2, NordenClass::W1W3,
                                     NordenClass::W2W3, NordenClass::W1W2W3};
  for (const NordenClass sub : kAll) {
    if (!rep.member(sub)) continue;
    for (const NordenClass super : kAll) {
      if (!class_includes(sub, super)) continue;
      auto& e = rep.entries[static_cast<std::size_t>(super)];
      if (e.verdict == Verdict::NotMember) {
        std::ostringstream os;
        os << "class lattice violated: " << class_name(sub) << " holds (residual "
           << rep.entry(sub).residual << ") but " << class_name(super)
           << " is rejected (residual " << e.residual << ")";
        rep.inconsistency = os.str();
        return;
      }
      e.verdict = Verdict::Member;
    }
  }
}

void cyclic_defects(const Tens3<double>& F_ad, std::vector<double>& out) {
  const int m2 = F_ad.dim();
  out.clear();
  out.reserve(static_cast<std::size_t>(m2) * m2 * m2);
  for (int a = 0; a < m2; ++a)
    for (int b = 0; b < m2; ++b)
      for (int c = 0; c < m2; ++c)
        out.push_back(F_ad(a, b, c) + F_ad(b, c, a) + F_ad(c, a, b));
}

}  // namespace norden

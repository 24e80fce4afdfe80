#include <doctest.h>

#include <cmath>

#include "norden/families.hpp"
#include "norden/sampling.hpp"

using namespace norden;

namespace {

std::vector<TangentPoint> points(const SpaceForm& sf, uint64_t seed, int n, double t_hi) {
  SamplingConfig sc;
  sc.num_points = n;
  sc.seed = seed;
  sc.t_hi = t_hi;
  return sample_points(sf, sc);
}

}  // namespace

TEST_CASE("integrable b's vanish for a constant structure on a flat base") {
  JPart jp = integrable_family(parse_expr("sqrt(1+2*0*t)"), ScalarFn::constant(0.0), 0.0, 1.0);
  for (double t : {0.0, 0.3, 0.9}) {
    CHECK(jp.b1.eval_jet(t).v == doctest::Approx(0.0));
    CHECK(jp.b2.eval_jet(t).v == doctest::Approx(0.0));
    CHECK(jp.b3.eval_jet(t).v == doctest::Approx(0.0));
  }
}

TEST_CASE("integrable b1 at t = 0 for the square-root profile") {
  // a1(0) = 1, a1'(0) = c: the numerator a1 a1' - c cancels exactly
  JPart jp = integrable_family(parse_expr("sqrt(1+2*t)"), ScalarFn::constant(0.0), 1.0, 2.0);
  CHECK(jp.b1.eval_jet(0.0).v == doctest::Approx(0.0));
  // and stays zero along the profile (the closed-form diagonal family)
  for (double t : {0.5, 1.0, 1.5}) CHECK(std::abs(jp.b1.eval_jet(t).v) < 1e-12);
}

TEST_CASE("integrable J has vanishing Nijenhuis tensor downstream") {
  SpaceForm sf{2, 1.0};
  CoefficientFamily fam =
      integrable_norden("int", parse_expr("1+t"), parse_expr("t/2"), parse_expr("2+t"),
                        parse_expr("0.1*t"), parse_expr("0"), parse_expr("0"), 1.0, 0.55);
  auto pts = points(sf, 3, 10, 0.45);
  CHECK(residual_set(fam, sf, pts).nijenhuis < 1e-6);
}

TEST_CASE("integrable denominator zero crossing is located") {
  // a1 = 1+t, c = 0: a1 - 2t a1' = 1 - t crosses at t = 1
  CHECK_THROWS_AS(integrable_family(parse_expr("1+t"), ScalarFn::constant(0.0), 0.0, 1.5),
                  DenominatorError);
  try {
    integrable_family(parse_expr("1+t"), ScalarFn::constant(0.0), 0.0, 1.5);
  } catch (const DenominatorError& e) {
    CHECK(e.t == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("diagonal family: flat case is constant") {
  CoefficientFamily fam = diagonal_ak(1.0, 1.0, 0.0);
  for (double t : {0.0, 0.7, 1.9}) {
    CoeffJets j = fam.jets_at(t);
    CHECK(j.a1.v == doctest::Approx(1.0));
    CHECK(j.c1.v == doctest::Approx(1.0));
    CHECK(j.c2.v == doctest::Approx(-1.0));
    CHECK(j.d1.v == doctest::Approx(0.0));
    CHECK(j.d2.v == doctest::Approx(0.0));
  }
}

TEST_CASE("diagonal family: closed-form values at t = 1.5 for A=B=c=1") {
  CoefficientFamily fam = diagonal_ak(1.0, 1.0, 1.0);
  CoeffJets j = fam.jets_at(1.5);
  CHECK(j.a1.v == doctest::Approx(2.0));
  CHECK(j.c1.v == doctest::Approx(4.0));
  CHECK(j.c2.v == doctest::Approx(-1.0));
  CHECK(j.d1.v == doctest::Approx(-1.0));
  CHECK(j.d2.v == doctest::Approx(0.25));
  CHECK(j.b1.v == doctest::Approx(0.0));
}

TEST_CASE("diagonal family with negative curvature lives on the tube") {
  CoefficientFamily fam = diagonal_ak(1.0, 1.0, -1.0);
  CHECK(fam.t_max == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_NOTHROW(fam.jets_at(0.45));
  CHECK_THROWS_AS(fam.jets_at(0.6), DomainError);
  CHECK(diagonal_ak(1.0, 2.0, 1.0).t_max > 5.0);
  CHECK_THROWS_AS(diagonal_ak(0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(diagonal_ak(1.0, -1.0, 1.0), ConfigError);
}

TEST_CASE("parallel family construction: flat diagonal seed stays constant") {
  CoefficientFamily fam = ak_family(ScalarFn::constant(1.0), ScalarFn::constant(0.0), 1.0,
                                    0.0, 0.0, 1.0, 1e-2);
  for (double t : {0.0, 0.35, 0.9}) {
    CHECK(fam.c1.eval_jet(t).v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fam.c3.eval_jet(t).v == doctest::Approx(0.0));
    CHECK(fam.c1.eval_jet(t).d == doctest::Approx(0.0));
  }
}

TEST_CASE("parallel family with diagonal inputs reproduces the closed form to 1e-8") {
  const double c = 1.0;
  CoefficientFamily closed = diagonal_ak(1.0, 1.0, c);
  CoefficientFamily integrated =
      ak_family(parse_expr("sqrt(1+2*t)"), ScalarFn::constant(0.0), 1.0, 0.0, c, 1.0, 1e-3);
  auto table = integrated.c1.table();
  REQUIRE(table);
  for (std::size_t k = 0; k < table->nodes(); k += 50) {
    double t = table->node_t(k);
    CoeffJets a = integrated.jets_at(t), b = closed.jets_at(t);
    CHECK(std::abs(a.c1.v - b.c1.v) < 1e-8);
    CHECK(std::abs(a.c3.v - b.c3.v) < 1e-8);
    CHECK(std::abs(a.d1.v - b.d1.v) < 1e-8);
    CHECK(std::abs(a.d2.v - b.d2.v) < 1e-8);
    // d1 = c c2 = -c c1 / a1^2 along the closed form
    CHECK(std::abs(a.d1.v - c * a.c2.v) < 1e-12);
    CHECK(std::abs(a.d1.v + c * a.c1.v / (a.a1.v * a.a1.v)) < 1e-8);
  }
}

TEST_CASE("parallel family drives F to the analytic floor") {
  SpaceForm sf{2, 1.0};
  CoefficientFamily fam =
      ak_family(parse_expr("1+t"), parse_expr("t/2"), 2.0, 0.1, 1.0, 0.55, 1e-3);
  auto pts = points(sf, 7, 15, 0.5);
  CHECK(residual_AK(fam, sf, pts) < 1e-5);
  CHECK(check_family(fam, std::vector<double>{0.0, 0.2, 0.5}).max_residual < 1e-6);
}

TEST_CASE("table trajectory error converges at 4th order against a fine reference") {
  auto build = [](double step) {
    return ak_family(parse_expr("1+t"), parse_expr("t/2"), 2.0, 0.1, 1.0, 0.5, step);
  };
  CoefficientFamily ref = build(1e-4);
  auto table_error = [&](double step) {
    CoefficientFamily fam = build(step);
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      double t = 0.5 * (i + 0.4) / 21.0;  // off-node points
      worst = std::max(worst, std::abs(fam.c1.eval_jet(t).v - ref.c1.eval_jet(t).v));
    }
    return worst;
  };
  double e1 = table_error(0.05), e2 = table_error(0.025);
  CHECK(e1 / e2 >= 4.0);
  CHECK(table_error(2e-3) < 1e-10);
}

TEST_CASE("negative curvature stops the parallel integration at the validity edge") {
  // c = -1 with a1 = sqrt(1-2t): the structural denominator degenerates
  // near t = 0.5, inside [0, 0.6]
  CHECK_THROWS_AS(ak_family(parse_expr("sqrt(1-2*t)"), ScalarFn::constant(0.0), 1.0, 0.0,
                            -1.0, 0.6, 1e-3),
                  Error);
}

TEST_CASE("conformal family: flat case has d1 = 0 and the stated d3") {
  CoefficientFamily fam = conformal_ak_family(parse_expr("1+t"), parse_expr("t/2"),
                                              parse_expr("2+t"), parse_expr("0.3"), 0.0, 0.9);
  for (double t : {0.1, 0.4, 0.8}) {
    CoeffJets j = fam.jets_at(t);
    CHECK(j.d1.v == doctest::Approx(0.0));
    double want_d3 = (j.a3.d * j.c1.v - j.a1.d * j.c3.v) / j.a1.v;
    CHECK(j.d3.v == doctest::Approx(want_d3).epsilon(1e-12));
  }
}

TEST_CASE("conformal family with diagonal inputs reduces to the diagonal shape") {
  CoefficientFamily fam = conformal_ak_family(parse_expr("sqrt(1+2*t)"),
                                              ScalarFn::constant(0.0), parse_expr("1+2*t"),
                                              ScalarFn::constant(0.0), 1.0, 1.5);
  for (double t : {0.0, 0.5, 1.2}) {
    CoeffJets j = fam.jets_at(t);
    CHECK(j.d1.v == doctest::Approx(-j.c1.v / (j.a1.v * j.a1.v)).epsilon(1e-12));
    CHECK(j.d1.v == doctest::Approx(1.0 * j.c2.v).epsilon(1e-12));  // = c c2 when also parallel
  }
}

TEST_CASE("quasi family: flat trivial seed is exactly stationary") {
  SpaceForm sf{2, 0.0};
  QuasiSeed seed;
  seed.b1 = ScalarFn::constant(0.0);
  seed.b3 = ScalarFn::constant(0.0);
  seed.c1_0 = 1.0;
  QuasiResult qr = quasi_ak_family(seed, sf, 0.5, 1e-2);
  CHECK(qr.omega3_residual < 1e-12);
  for (double t : {0.0, 0.2, 0.45}) {
    CoeffJets j = qr.family.jets_at(t);
    CHECK(j.a1.v == doctest::Approx(1.0));
    CHECK(j.c1.v == doctest::Approx(1.0));
    CHECK(j.d1.v == doctest::Approx(0.0));
    CHECK(j.d3.v == doctest::Approx(0.0));
  }
}

TEST_CASE("quasi family: generic seed yields a valid Norden family and a measured residual") {
  SpaceForm sf{2, 1.0};
  QuasiSeed seed;
  seed.b1 = parse_expr("0.1");
  seed.b3 = parse_expr("0.05");
  seed.c1_0 = 1.5;
  seed.c3_0 = 0.1;
  seed.d1_0 = 0.1;
  QuasiResult qr = quasi_ak_family(seed, sf, 0.4, 5e-3);
  std::vector<double> ts{0.0, 0.1, 0.2, 0.3, 0.38};
  ConstraintReport cr = check_family(qr.family, ts);
  CHECK(cr.max_residual < 1e-6);  // Norden by construction
  CHECK(std::isfinite(qr.omega3_residual));
  // the printed derivative laws steer the family close to the cyclic
  // identity; the achieved residual is reported, not asserted small
  CHECK(qr.omega3_residual < 0.05);
  auto pts = points(sf, 11, 8, 0.35);
  CHECK(residual_w3(qr.family, sf, pts) < 0.05);
}

TEST_CASE("quasi family reports a structural denominator crossing") {
  SpaceForm sf{2, 1.0};
  QuasiSeed seed;
  seed.b1 = parse_expr("0-0.6");
  seed.b3 = ScalarFn::constant(0.0);
  CHECK_THROWS_AS(quasi_ak_family(seed, sf, 1.0, 1e-2), Error);
}

TEST_CASE("necessary-condition laws on the parallel family") {
  SpaceForm sf{2, 1.0};
  CoefficientFamily fam =
      ak_family(parse_expr("1+t"), parse_expr("t/2"), 2.0, 0.1, 1.0, 0.55, 1e-3);
  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(0.05 * i);

  // laws consistent with the parallel construction hold at the jet floor
  CHECK(check_necessary(NecessaryId::SemiC3, fam, sf, ts).max_residual < 1e-9);
  CHECK(check_necessary(NecessaryId::W1W3A1, fam, sf, ts).max_residual < 1e-9);

  // the printed special-class c1', w1+w3 a3' and ricci-flat a1' laws are
  // inconsistent with the parallel family (documented upstream misprints);
  // freeze the measured behaviour so any change is surfaced
  CHECK(check_necessary(NecessaryId::SpecialC1, fam, sf, ts).max_residual > 1e-3);
  CHECK(check_necessary(NecessaryId::W1W3A3, fam, sf, ts).max_residual > 1e-3);
  CHECK(check_necessary(NecessaryId::RicciFlatA1, fam, sf, ts).max_residual > 1e-3);
}

TEST_CASE("necessary-condition laws: trivial family zeroes, strict-w1 witness") {
  SpaceForm flat{2, 0.0};
  CoefficientFamily triv = trivial_flat();
  std::vector<double> ts{0.0, 0.3, 0.8};
  for (auto id : {NecessaryId::SemiC3, NecessaryId::RicciFlatA1, NecessaryId::SpecialC1,
                  NecessaryId::W1W3A1, NecessaryId::W1W3A3})
    CHECK(check_necessary(id, triv, flat, ts).max_residual < 1e-14);

  SpaceForm sf{2, 1.0};
  CoefficientFamily strict = conformal_ak_family(parse_expr("1+t"), parse_expr("t/2"),
                                                 parse_expr("2+t"), parse_expr("0"), 1.0, 0.55);
  std::vector<double> ts2{0.1, 0.25, 0.4};
  CHECK(check_necessary(NecessaryId::SemiC3, strict, sf, ts2).max_residual > 1e-3);
}

TEST_CASE("perturbing a seed re-derives the dependent half and keeps the family Norden") {
  CoefficientFamily fam = diagonal_ak(1.0, 1.0, 1.0);
  CoefficientFamily bad = perturb_seed(fam, "d1", 0.05);
  std::vector<double> ts{0.0, 0.4, 1.0};
  CHECK(check_family(bad, ts).max_residual < 1e-12);
  SpaceForm sf{2, 1.0};
  auto pts = points(sf, 9, 10, 0.6);
  CHECK(residual_AK(bad, sf, pts) > 1e-3);
  CHECK(residual_AK(fam, sf, pts) < 1e-8);
}

TEST_CASE("build_family covers the spec'd kinds and perturbations") {
  SpaceForm sf{2, 1.0};
  FamilySpec spec;
  spec.kind = "diagonal-ak";
  CoefficientFamily fam = build_family(spec, sf);
  CHECK(fam.analytic);

  spec.kind = "general-ak";
  spec.a1 = "1+t";
  spec.a3 = "t/2";
  spec.c1_0 = 2.0;
  spec.c3_0 = 0.1;
  spec.t_max = 0.55;
  CHECK_FALSE(build_family(spec, sf).analytic);

  spec.kind = "custom";
  spec.coeffs = {{"a1", "1"}, {"a2", "1"}, {"a3", "0"}, {"b1", "0"}, {"b2", "0"},
                 {"b3", "0"}, {"c1", "1"}, {"c2", "-1"}, {"c3", "0"}, {"d1", "0"},
                 {"d2", "0"}, {"d3", "0"}};
  CHECK(build_family(spec, sf).name == "custom");
  spec.coeffs.erase("d3");
  CHECK_THROWS_AS(build_family(spec, sf), ConfigError);

  FamilySpec pert;
  pert.kind = "diagonal-ak";
  pert.perturb.push_back({"d1", 0.05, 1.0, true});
  CoefficientFamily fp = build_family(pert, sf);
  CHECK(fp.name.find("recompleted") != std::string::npos);

  FamilySpec bad;
  bad.kind = "nonsense";
  CHECK_THROWS_AS(build_family(bad, sf), ConfigError);
}

TEST_CASE("every constructor's output satisfies the coefficient constraints") {
  SpaceForm sf{2, 1.0};
  std::vector<double> ts{0.0, 0.15, 0.3, 0.45};
  std::vector<CoefficientFamily> fams;
  fams.push_back(trivial_flat());
  fams.push_back(diagonal_ak(1.0, 1.0, 1.0));
  fams.push_back(ak_family(parse_expr("1+t"), parse_expr("t/2"), 2.0, 0.1, 1.0, 0.55, 1e-3));
  fams.push_back(conformal_ak_family(parse_expr("1+t"), parse_expr("t/2"), parse_expr("2+t"),
                                     parse_expr("0.1*t"), 1.0, 0.55));
  fams.push_back(integrable_norden("int", parse_expr("1+t"), parse_expr("t/2"),
                                   parse_expr("2+t"), parse_expr("0.1*t"), parse_expr("0.05"),
                                   parse_expr("0"), 1.0, 0.55));
  fams.push_back(generic_norden("gen", parse_expr("1+t/2"), parse_expr("t/3"),
                                parse_expr("0.2"), parse_expr("0.1+t/4"), parse_expr("2+t"),
                                parse_expr("0.3*t"), parse_expr("0.1"), parse_expr("0.05"),
                                1.0, 2.0));
  {
    QuasiSeed seed;
    seed.b1 = parse_expr("0.1");
    seed.b3 = parse_expr("0.05");
    seed.c1_0 = 1.5;
    seed.c3_0 = 0.1;
    seed.d1_0 = 0.1;
    fams.push_back(quasi_ak_family(seed, sf, 0.5, 1e-2).family);
  }
  for (const auto& fam : fams) {
    ConstraintReport rep = check_family(fam, ts);
    INFO("family ", fam.name);
    CHECK(rep.pass(fam.analytic ? 1e-9 : 1e-6));
  }
}

TEST_CASE("mismatched b-curvature is the integrability witness") {
  SpaceForm sf{2, 1.0};
  FamilySpec spec;
  spec.kind = "integrable";
  spec.a1 = "1+t";
  spec.a3 = "t/2";
  spec.c1 = "2+t";
  spec.c3 = "0.1*t";
  spec.t_max = 0.55;
  CoefficientFamily good = build_family(spec, sf);
  spec.b_curvature = 0.0;  // b's derived for the wrong base
  CoefficientFamily bad = build_family(spec, sf);
  auto pts = points(sf, 99, 10, 0.45);
  CHECK(residual_set(good, sf, pts).nijenhuis < 1e-6);
  CHECK(residual_set(bad, sf, pts).nijenhuis > 1e-2);
}

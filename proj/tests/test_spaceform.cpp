#include <doctest.h>

#include <cmath>

#include "norden/sampling.hpp"
#include "norden/spaceform.hpp"

using namespace norden;

namespace {

std::vector<double> random_chart_point(Rng& rng, int n) {
  std::vector<double> x(n);
  for (auto& xi : x) xi = 0.5 * rng.next_symmetric();
  return x;
}

}  // namespace

TEST_CASE("metric at origin is the identity with vanishing Christoffels") {
  for (double c : {-1.0, 0.0, 1.0, 2.5}) {
    SpaceForm sf{2, c};
    BasePointData bp = metric_at(sf, std::vector<double>{0.0, 0.0});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(bp.g(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
        for (int h = 0; h < 2; ++h) CHECK(bp.gamma(h, i, j) == doctest::Approx(0.0));
      }
  }
}

TEST_CASE("flat space is identity everywhere") {
  SpaceForm sf{3, 0.0};
  BasePointData bp = metric_at(sf, std::vector<double>{0.4, -0.2, 0.1});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(bp.g(i, j) == (i == j ? 1.0 : 0.0));
      for (int h = 0; h < 3; ++h) {
        CHECK(bp.gamma(h, i, j) == 0.0);
        for (int l = 0; l < 3; ++l) CHECK(bp.dgamma(l, h, i, j) == 0.0);
      }
    }
}

TEST_CASE("Christoffels match central differences of the metric") {
  SpaceForm sf{2, 1.0};
  std::vector<double> x{0.3, -0.1};
  BasePointData bp = metric_at(sf, x);
  const double h = 1e-5;
  const int n = sf.n;
  // Gamma^h_{ki} from FD: 0.5 g^{hm} (d_k g_mi + d_i g_mk - d_m g_ki)
  Tens3<double> dg_fd(n);
  for (int l = 0; l < n; ++l) {
    auto xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    BasePointData bpp = metric_at(sf, xp), bpm = metric_at(sf, xm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg_fd(l, i, j) = (bpp.g(i, j) - bpm.g(i, j)) / (2 * h);
  }
  for (int hh = 0; hh < n; ++hh)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int m = 0; m < n; ++m)
          v += 0.5 * bp.g_inv(hh, m) * (dg_fd(k, m, i) + dg_fd(i, m, k) - dg_fd(m, k, i));
        CHECK(std::abs(bp.gamma(hh, k, i) - v) < 1e-6);
      }
}

TEST_CASE("dGamma matches central differences of Gamma") {
  SpaceForm sf{3, -1.0};
  std::vector<double> x{0.2, 0.1, -0.3};
  BasePointData bp = metric_at(sf, x);
  const double h = 1e-5;
  for (int l = 0; l < 3; ++l) {
    auto xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    BasePointData bpp = metric_at(sf, xp), bpm = metric_at(sf, xm);
    for (int hh = 0; hh < 3; ++hh)
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i) {
          double fd = (bpp.gamma(hh, k, i) - bpm.gamma(hh, k, i)) / (2 * h);
          CHECK(std::abs(bp.dgamma(l, hh, k, i) - fd) < 1e-6);
        }
  }
}

TEST_CASE("metricity holds to 1e-10 at 50 random points") {
  Rng rng(3);
  for (double c : {-1.0, 1.0}) {
    SpaceForm sf{2, c};
    for (int rep = 0; rep < 25; ++rep) {
      auto x = random_chart_point(rng, 2);
      BasePointData bp = metric_at(sf, x);
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double v = bp.dg(k, i, j);
            for (int l = 0; l < 2; ++l)
              v -= bp.gamma(l, k, i) * bp.g(l, j) + bp.gamma(l, k, j) * bp.g(i, l);
            CHECK(std::abs(v) < 1e-10);
          }
    }
  }
}

TEST_CASE("curvature identities") {
  SUBCASE("flat: all components vanish") {
    SpaceForm sf{2, 0.0};
    Tens4<double> R = curvature_at(sf, std::vector<double>{0.3, 0.2});
    CHECK(R.max_abs() == doctest::Approx(0.0));
  }
  SUBCASE("unit curvature at the origin, n = 3") {
    SpaceForm sf{3, 1.0};
    Tens4<double> R = curvature_at(sf, std::vector<double>{0.0, 0.0, 0.0});
    CHECK(R(0, 1, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));  // R^1_212 = c
    CHECK(R(0, 1, 1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(R(2, 1, 2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("space-form shape at random points") {
    Rng rng(5);
    for (double c : {-1.0, 0.0, 1.0})
      for (int n : {2, 3}) {
        SpaceForm sf{n, c};
        for (int rep = 0; rep < 5; ++rep)
          CHECK(curvature_residual(sf, random_chart_point(rng, n)) < 1e-7);
      }
  }
  SUBCASE("first Bianchi identity") {
    Rng rng(9);
    SpaceForm sf{3, 1.0};
    for (int rep = 0; rep < 10; ++rep) {
      Tens4<double> R = curvature_at(sf, random_chart_point(rng, 3));
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              CHECK(std::abs(R(h, k, i, j) + R(h, i, j, k) + R(h, j, k, i)) < 1e-9);
    }
  }
}

TEST_CASE("Ricci equals c(n-1)g") {
  SUBCASE("flat") {
    SpaceForm sf{2, 0.0};
    CHECK(ricci_at(sf, std::vector<double>{0.1, 0.4}).max_abs() == doctest::Approx(0.0));
  }
  SUBCASE("c = 1, n = 3 at the origin: 2 I") {
    SpaceForm sf{3, 1.0};
    Mat<double> ric = ricci_at(sf, std::vector<double>{0.0, 0.0, 0.0});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(ric(i, j) == doctest::Approx(i == j ? 2.0 : 0.0).epsilon(1e-10));
  }
  SUBCASE("c = -1 random points: Ric + (n-1) g = 0") {
    Rng rng(13);
    SpaceForm sf{3, -1.0};
    for (int rep = 0; rep < 5; ++rep) {
      auto x = random_chart_point(rng, 3);
      Mat<double> ric = ricci_at(sf, x);
      BasePointData bp = metric_at(sf, x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          CHECK(std::abs(ric(i, j) + 2.0 * bp.g(i, j)) < 1e-7);
    }
  }
}

TEST_CASE("points outside the chart are rejected") {
  SpaceForm sf{2, -1.0};  // chart needs |x|^2 < 4
  CHECK_THROWS_AS(metric_at(sf, std::vector<double>{2.5, 0.0}), DomainError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pefem/errors.hpp"
#include "pefem/quadrature.hpp"

using namespace pefem;

TEST_CASE("monomial integral closed form") {
  // Oracle: direct integration \int_0^1 \int_0^{1-x} x^a y^b dy dx.
  CHECK(triangle_monomial_integral(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(triangle_monomial_integral(1, 0) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(triangle_monomial_integral(2, 0) == doctest::Approx(1.0 / 12).epsilon(1e-15));
  CHECK(triangle_monomial_integral(1, 1) == doctest::Approx(1.0 / 24).epsilon(1e-15));
  CHECK(triangle_monomial_integral(2, 2) == doctest::Approx(1.0 / 180).epsilon(1e-14));
  CHECK(triangle_monomial_integral(5, 3) == doctest::Approx(1.984126984126984e-4).epsilon(1e-13));
  CHECK(triangle_monomial_integral(0, 10) == doctest::Approx(7.575757575757576e-3).epsilon(1e-13));
}

TEST_CASE("triangle rules integrate monomials exactly") {
  for (int degree = 1; degree <= 10; ++degree) {
    const auto& rule = triangle_quadrature(degree);
    double wsum = 0.0;
    for (const auto& p : rule.points) {
      CHECK(p.w > 0.0);
      CHECK(p.x >= 0.0);
      CHECK(p.y >= 0.0);
      CHECK(p.x + p.y <= 1.0 + 1e-14);
      wsum += p.w;
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double q = 0.0;
        for (const auto& p : rule.points) q += p.w * std::pow(p.x, a) * std::pow(p.y, b);
        CHECK(q == doctest::Approx(triangle_monomial_integral(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("degree-2 rule on x^2 + y^2") {
  const auto& rule = triangle_quadrature(2);
  double q = 0.0;
  for (const auto& p : rule.points) q += p.w * (p.x * p.x + p.y * p.y);
  // \int x^2 = \int y^2 = 1/12, sum = 1/6.
  CHECK(q == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("triangle rules are symmetric") {
  // A rule invariant under the triangle's symmetries must give identical
  // results for x^a y^b and y^a x^b.
  for (int degree : {4, 6, 8, 10}) {
    const auto& rule = triangle_quadrature(degree);
    auto integ = [&](int a, int b) {
      double q = 0.0;
      for (const auto& p : rule.points) q += p.w * std::pow(p.x, a) * std::pow(p.y, b);
      return q;
    };
    // Probe beyond the exactness degree so symmetry is not implied by it.
    int a = degree + 3, b = 1;
    CHECK(integ(a, b) == doctest::Approx(integ(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("gauss-legendre edge rules") {
  for (int n = 1; n <= 10; ++n) {
    const auto& pts = edge_gauss(n);
    CHECK(static_cast<int>(pts.size()) == n);
    double wsum = 0.0;
    for (const auto& p : pts) {
      CHECK(p.w > 0.0);
      CHECK(p.t > 0.0);
      CHECK(p.t < 1.0);
      wsum += p.w;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double q = 0.0;
      for (const auto& p : pts) q += p.w * std::pow(p.t, d);
      CHECK(q == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss-legendre nodes match known closed forms") {
  // n = 2: nodes (1 -/+ 1/sqrt(3))/2, weights 1/2.
  const auto& p2 = edge_gauss(2);
  CHECK(p2[0].t == doctest::Approx(0.5 - 0.5 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(p2[1].t == doctest::Approx(0.5 + 0.5 / std::sqrt(3.0)).epsilon(1e-15));
  // n = 3: center node 1/2; weight 8/9 on [-1,1] halves to 4/9 on [0,1].
  const auto& p3 = edge_gauss(3);
  CHECK(p3[1].t == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p3[1].w == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("out-of-range requests are rejected") {
  CHECK_THROWS_AS(triangle_quadrature(0), ValidationError);
  CHECK_THROWS_AS(triangle_quadrature(11), ValidationError);
  CHECK_THROWS_AS(edge_gauss(0), ValidationError);
  CHECK_THROWS_AS(edge_gauss(11), ValidationError);
}

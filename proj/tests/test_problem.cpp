#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "pefem/errors.hpp"
#include "pefem/problem.hpp"

using namespace pefem;

namespace {

// Five-point Laplacian; arbitrates the right-hand side against -p * lap(u).
double fd_laplacian(const std::function<double(Vec2)>& u, Vec2 q, double h) {
  return (u({q.x + h, q.y}) + u({q.x - h, q.y}) + u({q.x, q.y + h}) + u({q.x, q.y - h}) -
          4.0 * u(q)) /
         (h * h);
}

Vec2 fd_gradient(const std::function<double(Vec2)>& u, Vec2 q, double h) {
  return {(u({q.x + h, q.y}) - u({q.x - h, q.y})) / (2.0 * h),
          (u({q.x, q.y + h}) - u({q.x, q.y - h})) / (2.0 * h)};
}

const std::vector<Vec2> kDiskSamples = {{0.0, 0.0}, {0.1, 0.05}, {-0.15, 0.12}, {0.2, -0.1}};
const std::vector<Vec2> kAnnulusSamples = {{0.3, 0.0}, {-0.2, 0.25}, {0.1, -0.4}, {0.33, 0.3}};

void check_consistency(const InterfaceProblem& ip) {
  const double h = 7e-5;
  for (int side = 0; side < 2; ++side) {
    const auto& samples = side == 0 ? kDiskSamples : kAnnulusSamples;
    for (Vec2 q : samples) {
      const double fd = -ip.side[side].p * fd_laplacian(ip.side[side].u, q, h);
      CHECK(std::abs(ip.side[side].f(q) - fd) <= 1e-6);
      const Vec2 g = fd_gradient(ip.side[side].u, q, h);
      const Vec2 ga = ip.side[side].grad_u(q);
      CHECK(std::abs(ga.x - g.x) <= 1e-6);
      CHECK(std::abs(ga.y - g.y) <= 1e-6);
    }
  }
  // Interface conditions on the exact circle: continuity and flux balance.
  for (int i = 0; i < 12; ++i) {
    const double t = two_pi * i / 12.0;
    const Vec2 q{0.25 * std::cos(t), 0.25 * std::sin(t)};
    const Vec2 n = q / 0.25;
    CHECK(ip.side[0].u(q) == doctest::Approx(ip.side[1].u(q)).epsilon(1e-13));
    CHECK(ip.side[0].p * dot(ip.side[0].grad_u(q), n) ==
          doctest::Approx(ip.side[1].p * dot(ip.side[1].grad_u(q), n)).epsilon(1e-12).scale(1.0));
  }
  // Outer data agrees with the annulus field on the outer circle.
  for (int i = 0; i < 8; ++i) {
    const double t = two_pi * (i + 0.3) / 8.0;
    const Vec2 q{0.5 * std::cos(t), 0.5 * std::sin(t)};
    CHECK(ip.outer_data(q) == doctest::Approx(ip.side[1].u(q)).epsilon(1e-14));
  }
}

}  // namespace

TEST_CASE("gaussian case matches frozen values") {
  const InterfaceProblem& ip = manufactured_case("gaussian_disk_annulus");
  CHECK(ip.interface.radius == doctest::Approx(0.25));
  CHECK(ip.outer_radius == doctest::Approx(0.5));
  CHECK(ip.side[0].p == 1.0);
  CHECK(ip.side[1].p == 2.0);

  const Vec2 q{0.25, 0.0};
  CHECK(ip.side[0].u(q) == doctest::Approx(0.7316156289466418).epsilon(1e-15));
  CHECK(ip.side[0].grad_u(q).x == doctest::Approx(-1.8290390723666045).epsilon(1e-14));
  CHECK(ip.side[0].grad_u(q).y == doctest::Approx(0.0));
  CHECK(ip.side[0].f(q) == doctest::Approx(10.059714898016324).epsilon(1e-14));
  CHECK(ip.outer_data({0.5, 0.0}) == doctest::Approx(0.509060212903416).epsilon(1e-14));
  // The two sides share one right-hand side field.
  for (Vec2 s : kAnnulusSamples) CHECK(ip.side[0].f(s) == doctest::Approx(ip.side[1].f(s)));

  CHECK_THROWS_AS(manufactured_case("unknown"), ValidationError);
}

TEST_CASE("gaussian case satisfies the pde and interface conditions") {
  check_consistency(manufactured_case("gaussian_disk_annulus"));
}

TEST_CASE("generic patch cases are exact interface solutions") {
  for (int k = 1; k <= 4; ++k) {
    const InterfaceProblem ip = polynomial_patch_case(k, "generic");
    CHECK(ip.side[0].p == ip.side[1].p);
    check_consistency(ip);
    // Sides carry one shared field.
    for (Vec2 s : kDiskSamples) CHECK(ip.side[0].u(s) == doctest::Approx(ip.side[1].u(s)));
  }
}

TEST_CASE("radial patch cases balance flux with distinct coefficients") {
  for (int k = 1; k <= 4; ++k) {
    const InterfaceProblem ip = polynomial_patch_case(k, "radial");
    CHECK(ip.side[0].p != ip.side[1].p);
    check_consistency(ip);
    if (k == 1) {
      // Order-1 nonmatching reproduction only supports constants.
      for (Vec2 s : kDiskSamples) {
        CHECK(ip.side[0].u(s) == doctest::Approx(ip.side[0].u(kDiskSamples[0])));
        CHECK(ip.side[0].f(s) == doctest::Approx(0.0));
      }
    }
    if (k >= 2) {
      CHECK(ip.side[0].u({0.1, 0.0}) != doctest::Approx(ip.side[0].u({0.2, 0.0})));
    }
    if (k >= 4) {
      // The quartic term makes f vary with radius.
      CHECK(ip.side[0].f({0.0, 0.0}) != doctest::Approx(ip.side[0].f({0.2, 0.0})));
    }
  }
  CHECK_THROWS_AS(polynomial_patch_case(5, "radial"), ValidationError);
  CHECK_THROWS_AS(polynomial_patch_case(2, "odd"), ValidationError);
}

TEST_CASE("unit radial patch cases are one global field with unit diffusion") {
  for (int k = 1; k <= 4; ++k) {
    const InterfaceProblem ip = polynomial_patch_case(k, "radial_unit");
    CHECK(ip.side[0].p == 1.0);
    CHECK(ip.side[1].p == 1.0);
    check_consistency(ip);
    for (Vec2 s : kDiskSamples) CHECK(ip.side[0].u(s) == doctest::Approx(ip.side[1].u(s)));
  }
}

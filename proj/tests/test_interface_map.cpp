#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pefem/errors.hpp"
#include "pefem/interface_map.hpp"
#include "pefem/mesh.hpp"
#include "pefem/quadrature.hpp"

using namespace pefem;

namespace {

const Circle kDisk{{0.0, 0.0}, 0.25};

Vec2 chain_point_at(const BoundaryChain& c, int e, double s) {
  return c.p0[e] + (c.p1[e] - c.p0[e]) * s;
}

// Integrates the cross-map Jacobian over the source chain, splitting each
// edge at preimages of target vertices so every Gauss panel is smooth.
double integrate_jacobian(const BoundaryChain& from, const BoundaryChain& to) {
  const auto& gauss = edge_gauss(10);
  double total = 0.0;
  for (int e = 0; e < from.n_edges(); ++e) {
    std::vector<double> cuts = {0.0, 1.0};
    for (int tv = 0; tv < to.n_edges(); ++tv) {
      const Vec2 circle_pt = to.circle.center +
                             Vec2{std::cos(to.vertex_angle[tv]), std::sin(to.vertex_angle[tv])} *
                                 to.circle.radius;
      const ChainPoint pre = zeta(from, circle_pt);
      if (pre.edge == e && pre.s > 1e-12 && pre.s < 1.0 - 1e-12) cuts.push_back(pre.s);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      for (const auto& gp : gauss) {
        const double s = a + (b - a) * gp.t;
        total += cross_jacobian(from, to, chain_point_at(from, e, s)) * gp.w * (b - a) *
                 from.edge_len[e];
      }
    }
  }
  return total;
}

double max_abs_jacobian_minus_one(const BoundaryChain& from, const BoundaryChain& to) {
  double worst = 0.0;
  for (int e = 0; e < from.n_edges(); ++e) {
    for (int i = 0; i <= 200; ++i) {
      const double s = i / 200.0 * (1.0 - 1e-14);
      const double j = cross_jacobian(from, to, chain_point_at(from, e, s));
      worst = std::max(worst, std::abs(j - 1.0));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("chain extraction orders edges by angle with consistent normals") {
  const Mesh2D disk = build_disk_mesh(kDisk, 8);
  const BoundaryChain c = extract_chain(disk, BoundaryTag::Interface);
  REQUIRE(c.n_edges() == 8);
  CHECK(c.normal_sign == 1.0);
  CHECK(c.circle.radius == doctest::Approx(0.25));
  for (int e = 0; e < 8; ++e) {
    CHECK(c.vertex_angle[e] == doctest::Approx(two_pi * e / 8.0).epsilon(1e-13));
    CHECK(c.edge_len[e] == doctest::Approx(2.0 * 0.25 * std::sin(pi / 8.0)).epsilon(1e-13));
    CHECK(c.foot_dist[e] == doctest::Approx(0.23096988312782168).epsilon(1e-14));
    // The owning triangle must contain both edge endpoints.
    const auto& t = disk.triangles[c.tri[e]];
    const int a = c.vertex_ids[e];
    const int b = c.vertex_ids[(e + 1) % 8];
    CHECK(((t[0] == a || t[1] == a || t[2] == a)));
    CHECK(((t[0] == b || t[1] == b || t[2] == b)));
  }

  const Mesh2D ann = build_annulus_mesh(kDisk, 0.5, 8);
  const BoundaryChain inner = extract_chain(ann, BoundaryTag::Interface);
  const BoundaryChain outer = extract_chain(ann, BoundaryTag::Outer);
  CHECK(inner.normal_sign == -1.0);
  CHECK(outer.normal_sign == 1.0);
  CHECK(outer.circle.radius == doctest::Approx(0.5));
  CHECK(inner.n_edges() == 8);
  CHECK(outer.n_edges() == 8);

  CHECK_THROWS_AS(extract_chain(disk, BoundaryTag::Outer), ValidationError);
}

TEST_CASE("eta and zeta are inverse on the chain") {
  const Mesh2D disk = build_disk_mesh(kDisk, 16);
  const BoundaryChain c = extract_chain(disk, BoundaryTag::Interface);
  const auto& gauss = edge_gauss(4);
  for (int e = 0; e < c.n_edges(); ++e) {
    for (const auto& gp : gauss) {
      const Vec2 xi = chain_point_at(c, e, gp.t);
      const Vec2 y = eta(c, xi);
      CHECK(dist(y, c.circle.center) == doctest::Approx(0.25).epsilon(1e-14));
      const ChainPoint back = zeta(c, y);
      CHECK(back.edge == e);
      CHECK(dist(back.p, xi) <= 1e-13);
    }
  }
  // Circle -> chain -> circle round trip.
  for (int i = 0; i < 257; ++i) {
    const double theta = two_pi * i / 257.0;
    const Vec2 p = c.circle.center + Vec2{std::cos(theta), std::sin(theta)} * 0.25;
    const ChainPoint cp = zeta(c, p);
    CHECK(dist(eta(c, cp.p), p) <= 1e-13);
  }
  // A point at a vertex angle belongs to the edge that starts there.
  const Vec2 v3 = c.circle.center +
                  Vec2{std::cos(c.vertex_angle[3]), std::sin(c.vertex_angle[3])} * 0.25;
  const ChainPoint at_vertex = zeta(c, v3);
  CHECK(at_vertex.edge == 3);
  CHECK(at_vertex.s <= 1e-12);

  CHECK_THROWS_AS(eta(c, Vec2{0.0, 0.0}), ValidationError);
}

TEST_CASE("projection offset equals the sagitta of a regular polygon") {
  for (int n : {8, 16, 32}) {
    const Mesh2D disk = build_disk_mesh(kDisk, n);
    const BoundaryChain c = extract_chain(disk, BoundaryTag::Interface);
    CHECK(max_projection_offset(c) ==
          doctest::Approx(0.25 * (1.0 - std::cos(pi / n))).epsilon(1e-13));
  }
  const Mesh2D d8 = build_disk_mesh(kDisk, 8);
  CHECK(max_projection_offset(extract_chain(d8, BoundaryTag::Interface)) ==
        doctest::Approx(0.019030116872178315).epsilon(1e-12));
  const Mesh2D d16 = build_disk_mesh(kDisk, 16);
  CHECK(max_projection_offset(extract_chain(d16, BoundaryTag::Interface)) ==
        doctest::Approx(0.004803679899192389).epsilon(1e-12));
}

TEST_CASE("cross map between identical polygons is the identity") {
  const Mesh2D disk = build_disk_mesh(kDisk, 16);
  const Mesh2D ann = build_annulus_mesh(kDisk, 0.5, 16);
  const BoundaryChain a = extract_chain(disk, BoundaryTag::Interface);
  const BoundaryChain b = extract_chain(ann, BoundaryTag::Interface);
  for (int e = 0; e < a.n_edges(); ++e) {
    for (double s : {0.1, 0.5, 0.93}) {
      const Vec2 xi = chain_point_at(a, e, s);
      const ChainPoint img = cross_map(a, b, xi);
      CHECK(dist(img.p, xi) <= 1e-14);
      CHECK(cross_jacobian(a, b, xi) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("cross-map Jacobian matches the analytic extreme and decays with refinement") {
  const Mesh2D d16 = build_disk_mesh(kDisk, 16);
  const Mesh2D a32 = build_annulus_mesh(kDisk, 0.5, 32);
  const BoundaryChain from16 = extract_chain(d16, BoundaryTag::Interface);
  const BoundaryChain to32 = extract_chain(a32, BoundaryTag::Interface);

  // For a 2:1 aligned pair the Jacobian extremes are reached at source edge
  // midpoints and vertices: sup J = 1/(cos(pi/32) cos(pi/16)) and
  // inf J = cos(pi/16)/cos(pi/32).
  const double sup = 1.0 / (std::cos(pi / 32.0) * std::cos(pi / 16.0)) - 1.0;
  const double measured16 = max_abs_jacobian_minus_one(from16, to32);
  CHECK(measured16 == doctest::Approx(sup).epsilon(1e-9));
  CHECK(measured16 == doctest::Approx(0.024524523).epsilon(1e-6));

  const Mesh2D d32 = build_disk_mesh(kDisk, 32);
  const Mesh2D a64 = build_annulus_mesh(kDisk, 0.5, 64);
  const double measured32 = max_abs_jacobian_minus_one(extract_chain(d32, BoundaryTag::Interface),
                                                       extract_chain(a64, BoundaryTag::Interface));
  // First-order decay bound with a stable constant; observed decay is ~4x.
  CHECK(measured32 <= 0.5 * measured16);

  // Orientation-reversed pair: the inverse-map Jacobian is the reciprocal.
  const Vec2 xi = chain_point_at(from16, 2, 0.37);
  const ChainPoint img = cross_map(from16, to32, xi);
  CHECK(cross_jacobian(to32, from16, img.p) * cross_jacobian(from16, to32, xi) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Chains on different circles cannot be cross-mapped.
  const BoundaryChain outer = extract_chain(a32, BoundaryTag::Outer);
  CHECK_THROWS_AS(cross_map(from16, outer, xi), ValidationError);
}

TEST_CASE("analytic Jacobian agrees with arc-length finite differences") {
  const Mesh2D d16 = build_disk_mesh(kDisk, 16);
  const Mesh2D a32 = build_annulus_mesh(kDisk, 0.5, 32);
  const BoundaryChain from = extract_chain(d16, BoundaryTag::Interface);
  const BoundaryChain to = extract_chain(a32, BoundaryTag::Interface);
  const double delta = 1e-7;
  int checked = 0;
  for (int e = 0; e < from.n_edges(); ++e) {
    for (double s : {0.12, 0.31, 0.68, 0.9}) {
      const Vec2 xi = chain_point_at(from, e, s);
      const Vec2 tangent = (from.p1[e] - from.p0[e]) / from.edge_len[e];
      const ChainPoint plus = cross_map(from, to, xi + tangent * delta);
      const ChainPoint minus = cross_map(from, to, xi - tangent * delta);
      if (plus.edge != minus.edge) continue;  // image straddles a target vertex
      const double fd = dist(plus.p, minus.p) / (2.0 * delta);
      CHECK(std::abs(cross_jacobian(from, to, xi) - fd) <= 1e-8);
      ++checked;
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("integrating the Jacobian reproduces the target perimeter") {
  const Mesh2D d16 = build_disk_mesh(kDisk, 16);
  const Mesh2D a32 = build_annulus_mesh(kDisk, 0.5, 32);
  const BoundaryChain from = extract_chain(d16, BoundaryTag::Interface);
  const BoundaryChain to = extract_chain(a32, BoundaryTag::Interface);
  const double perimeter32 = 32.0 * 2.0 * 0.25 * std::sin(pi / 32.0);
  CHECK(integrate_jacobian(from, to) == doctest::Approx(perimeter32).epsilon(1e-12));
  const double perimeter16 = 16.0 * 2.0 * 0.25 * std::sin(pi / 16.0);
  CHECK(integrate_jacobian(to, from) == doctest::Approx(perimeter16).epsilon(1e-12));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pefem/errors.hpp"
#include "pefem/mesh.hpp"

using namespace pefem;

namespace {
const Circle kInterface{{0.0, 0.0}, 0.25};

double boundary_sagitta(const Mesh2D& m, BoundaryTag tag) {
  const Circle& c =
      tag == BoundaryTag::Interface ? *m.interface_circle : *m.outer_circle;
  double worst = 0.0;
  for (const auto& be : m.boundary) {
    if (be.tag != tag) continue;
    Vec2 mid = 0.5 * (m.vertices[be.v0] + m.vertices[be.v1]);
    worst = std::max(worst, std::abs(c.radius - dist(mid, c.center)));
  }
  return worst;
}

int count_tag(const Mesh2D& m, BoundaryTag tag) {
  int n = 0;
  for (const auto& be : m.boundary)
    if (be.tag == tag) ++n;
  return n;
}
}  // namespace

TEST_CASE("disk mesh basic structure") {
  Mesh2D m = build_disk_mesh(kInterface, 8);
  CHECK(m.vertices.size() == 9);   // center + 8-gon fan
  CHECK(m.triangles.size() == 8);
  CHECK(count_tag(m, BoundaryTag::Interface) == 8);
  CHECK(count_tag(m, BoundaryTag::Outer) == 0);
  CHECK(mesh_size(m) == doctest::Approx(0.25).epsilon(1e-14));  // radial sides dominate
  CHECK(min_angle_deg(m) == doctest::Approx(45.0).epsilon(1e-12));

  // Chord length of the inscribed regular 8-gon.
  double chord = dist(m.vertices[m.boundary[0].v0], m.vertices[m.boundary[0].v1]);
  CHECK(chord == doctest::Approx(2 * 0.25 * std::sin(M_PI / 8)).epsilon(1e-14));
}

TEST_CASE("disk mesh ring construction") {
  // Fan of 8 sectors, 2 rings (1 + 8 + 16 vertices, 32 triangles), plus a
  // structured boundary band against the circle (16 vertices, 32 triangles).
  Mesh2D m = build_disk_mesh(kInterface, 16);
  CHECK(m.vertices.size() == 41);
  CHECK(m.triangles.size() == 64);
  CHECK(count_tag(m, BoundaryTag::Interface) == 16);
  CHECK(min_angle_deg(m) >= 20.0);
}

TEST_CASE("disk boundary vertices lie on the circle") {
  Mesh2D m = build_disk_mesh(kInterface, 32);
  for (const auto& be : m.boundary) {
    CHECK(std::abs(dist(m.vertices[be.v0], kInterface.center) - 0.25) <= 1e-13);
  }
}

TEST_CASE("disk sagitta matches closed form") {
  // Chord-to-arc gap of a regular n-gon: r (1 - cos(pi/n)).
  Mesh2D m8 = build_disk_mesh(kInterface, 8);
  CHECK(boundary_sagitta(m8, BoundaryTag::Interface) ==
        doctest::Approx(0.019030116872178315).epsilon(1e-12));
  Mesh2D m16 = build_disk_mesh(kInterface, 16);
  CHECK(boundary_sagitta(m16, BoundaryTag::Interface) ==
        doctest::Approx(0.004803679899192392).epsilon(1e-12));
}

TEST_CASE("annulus mesh basic structure") {
  Mesh2D m = build_annulus_mesh(kInterface, 0.5, 8);
  CHECK(m.vertices.size() == 16);  // one layer at this coarseness
  CHECK(m.triangles.size() == 16);
  CHECK(count_tag(m, BoundaryTag::Interface) == 8);
  CHECK(count_tag(m, BoundaryTag::Outer) == 8);
  // Longest side is the outer chord.
  CHECK(mesh_size(m) == doctest::Approx(0.3826834323650898).epsilon(1e-12));
  CHECK(min_angle_deg(m) >= 20.0);
  CHECK(m.outer_circle->radius == doctest::Approx(0.5));
}

TEST_CASE("annulus stays quasi-uniform across sizes") {
  for (int n : {8, 16, 24, 32, 64, 128}) {
    Mesh2D m = build_annulus_mesh(kInterface, 0.5, n);
    CHECK(min_angle_deg(m) >= 20.0);
    CHECK(count_tag(m, BoundaryTag::Interface) == n);
    CHECK(count_tag(m, BoundaryTag::Outer) == n);
  }
  for (int n : {12, 20, 48, 256}) {
    Mesh2D m = build_disk_mesh(kInterface, n);
    CHECK(min_angle_deg(m) >= 20.0);
    CHECK(count_tag(m, BoundaryTag::Interface) == n);
  }
}

TEST_CASE("refinement doubles boundary edges and snaps to circles") {
  Mesh2D m = build_annulus_mesh(kInterface, 0.5, 8);
  Mesh2D r = refine(m);
  CHECK(r.triangles.size() == 4 * m.triangles.size());
  CHECK(count_tag(r, BoundaryTag::Interface) == 16);
  CHECK(count_tag(r, BoundaryTag::Outer) == 16);
  for (const auto& be : r.boundary) {
    const Circle& c = be.tag == BoundaryTag::Interface ? *r.interface_circle : *r.outer_circle;
    CHECK(std::abs(dist(r.vertices[be.v0], c.center) - c.radius) <= 1e-13);
    CHECK(std::abs(dist(r.vertices[be.v1], c.center) - c.radius) <= 1e-13);
  }
  // Refined loop is the regular 16-gon: sagitta shrinks by ~4x.
  CHECK(boundary_sagitta(r, BoundaryTag::Interface) ==
        doctest::Approx(0.004803679899192392).epsilon(1e-12));

  Mesh2D rr = refine(r);
  CHECK(count_tag(rr, BoundaryTag::Interface) == 32);
  CHECK(mesh_size(rr) < mesh_size(r));
  CHECK(mesh_size(r) < mesh_size(m));
}

TEST_CASE("refinement keeps disk meshes valid over several levels") {
  Mesh2D m = build_disk_mesh(kInterface, 8);
  for (int level = 0; level < 4; ++level) {
    m = refine(m);  // check_mesh runs inside
  }
  CHECK(count_tag(m, BoundaryTag::Interface) == 128);
  CHECK(min_angle_deg(m) >= 20.0);
}

TEST_CASE("mesh_size of a single unit right triangle") {
  Mesh2D m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  CHECK(mesh_size(m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("invalid build parameters are rejected") {
  CHECK_THROWS_AS(build_disk_mesh(kInterface, 7), ValidationError);
  CHECK_THROWS_AS(build_disk_mesh(kInterface, 2), ValidationError);
  CHECK_THROWS_AS(build_disk_mesh({{0, 0}, -1.0}, 8), ValidationError);
  CHECK_THROWS_AS(build_disk_mesh(kInterface, 34), ValidationError);  // no factor in 4..13
  CHECK_THROWS_AS(build_annulus_mesh(kInterface, 0.2, 8), ValidationError);
  CHECK_THROWS_AS(build_annulus_mesh(kInterface, 0.5, 6), ValidationError);
  CHECK_THROWS_AS(build_annulus_mesh(kInterface, 0.5, 9), ValidationError);
}

TEST_CASE("check_mesh flags broken meshes") {
  Mesh2D m = build_disk_mesh(kInterface, 8);
  Mesh2D bad = m;
  std::swap(bad.triangles[0][1], bad.triangles[0][2]);  // flip orientation
  CHECK_THROWS_AS(check_mesh(bad), NumericalError);

  bad = m;
  bad.vertices[bad.boundary[0].v0] = bad.vertices[bad.boundary[0].v0] + Vec2{1e-6, 0};
  CHECK_THROWS_AS(check_mesh(bad), NumericalError);

  bad = m;
  bad.boundary.pop_back();
  CHECK_THROWS_AS(check_mesh(bad), NumericalError);
}

TEST_CASE("mesh dump format") {
  Mesh2D m = build_annulus_mesh(kInterface, 0.5, 8);
  std::ostringstream os;
  write_mesh(m, os);
  std::istringstream is(os.str());
  std::string word;
  size_t count;
  is >> word >> count;
  CHECK(word == "vertices");
  CHECK(count == m.vertices.size());
  for (size_t i = 0; i < 2 * count; ++i) {
    double v;
    is >> v;
    CHECK(std::isfinite(v));
  }
  is >> word >> count;
  CHECK(word == "triangles");
  CHECK(count == m.triangles.size());
}

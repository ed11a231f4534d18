#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pefem/geometry.hpp"

namespace pefem {

enum class BoundaryTag { Interface, Outer };

struct BoundaryEdge {
  int v0 = -1, v1 = -1;  // ordered so the adjacent triangle lies on the left
  int tri = -1;          // owning element
  BoundaryTag tag = BoundaryTag::Interface;
};

// Conforming triangle mesh with tagged boundary loops. Boundary loops are
// polygons inscribed in the stored circles; every tagged vertex lies on its
// circle to 1e-12 relative accuracy.
struct Mesh2D {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary;
  std::optional<Circle> interface_circle;
  std::optional<Circle> outer_circle;
};

// Structured disk mesh: central fan plus concentric rings and, when the fan
// has two or more rings, a thin structured boundary band (half the ring
// spacing) against the circle; exactly `n_interface_edges` equal boundary
// chords (even, >= 4).
Mesh2D build_disk_mesh(const Circle& circle, int n_interface_edges);

// Structured polar annulus mesh: `n_inner_edges` equal chords (even, >= 8)
// on both boundary circles; ring count keeps radial and tangential element
// sizes within a factor of two.
Mesh2D build_annulus_mesh(const Circle& inner, double outer_radius, int n_inner_edges);

// Uniform red refinement (each triangle into four); midpoints of tagged
// boundary edges are snapped radially onto the tag's circle, so boundary
// loops stay inscribed regular polygons with doubled edge count.
Mesh2D refine(const Mesh2D& m);

// Largest element diameter (longest triangle side).
double mesh_size(const Mesh2D& m);

double min_angle_deg(const Mesh2D& m);

// Validates conformity, orientation, tagged-loop closure, circle inscription
// and the 20-degree minimum-angle floor; throws NumericalError on violation.
void check_mesh(const Mesh2D& m);

// Plain-text dump: vertex/triangle/boundary sections with counts.
void write_mesh(const Mesh2D& m, std::ostream& os);

}  // namespace pefem

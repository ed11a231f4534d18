#pragma once

#include <vector>

#include "pefem/mesh.hpp"

namespace pefem {

// One tagged boundary loop of a mesh, reindexed counterclockwise in angle
// around its circle, with the per-edge geometry needed by the projection
// maps. Edge e runs from vertex_angle[e] to vertex_angle[(e+1) % n] and owns
// the half-open angular interval [vertex_angle[e], vertex_angle[e+1]).
struct BoundaryChain {
  Circle circle;
  BoundaryTag tag = BoundaryTag::Interface;
  double normal_sign = 1.0;  // +1: mesh outward normal points away from center
  std::vector<int> vertex_ids;     // chain-ordered mesh vertex of edge start
  std::vector<double> vertex_angle;
  std::vector<int> tri;            // owning element per edge
  std::vector<Vec2> p0, p1;        // edge endpoints in chain order
  std::vector<double> edge_len;
  std::vector<double> foot_dist;   // distance from center to the chord line
  std::vector<Vec2> outward;       // mesh outward unit normal per edge

  int n_edges() const { return static_cast<int>(vertex_ids.size()); }
};

// Extracts the tagged loop; throws ValidationError if the tag is absent and
// NumericalError if the loop is malformed.
BoundaryChain extract_chain(const Mesh2D& m, BoundaryTag tag);

struct ChainPoint {
  int edge = -1;
  double s = 0.0;  // parameter in [0,1) along the chain edge
  Vec2 p;
};

// Radial projection of a chain point onto the circle.
Vec2 eta(const BoundaryChain& chain, Vec2 xi);

// Inverse of eta: maps a circle point to the unique chain point on the same
// center ray (half-open angular edge ownership).
ChainPoint zeta(const BoundaryChain& chain, Vec2 circle_point);

// zeta_to(eta_from(xi)); both chains must be inscribed in the same circle.
ChainPoint cross_map(const BoundaryChain& from, const BoundaryChain& to, Vec2 xi);

// Sorted parameters in (0,1) on edge e of `chain` where center rays through
// the vertices of `other` cross the chord. A function pulled back from
// `other` through the cross map loses smoothness exactly at these points, so
// quadrature panels must be split there to stay exact for piecewise
// polynomials. Vertices shared by both chains produce no breakpoints.
std::vector<double> pullback_breakpoints(const BoundaryChain& chain, int e,
                                         const BoundaryChain& other);

// Derivative of arc length on `to` with respect to arc length on `from`
// under the cross map. For a chord at distance d from the center the angular
// speed is |dtheta/ds| = d / |xi - c|^2, so the Jacobian is
// (d_from / rho_from^2) * (rho_to^2 / d_to).
double cross_jacobian(const BoundaryChain& from, const BoundaryChain& to, Vec2 xi);

// max |eta(xi) - xi| over the chain (attained above each chord's foot).
double max_projection_offset(const BoundaryChain& chain);

}  // namespace pefem

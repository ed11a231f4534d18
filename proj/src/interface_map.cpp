#include "pefem/interface_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pefem/errors.hpp"

namespace pefem {

namespace {

const Circle& circle_for(const Mesh2D& m, BoundaryTag tag) {
  const auto& c = tag == BoundaryTag::Interface ? m.interface_circle : m.outer_circle;
  if (!c) throw ValidationError("mesh has no circle for the requested boundary tag");
  return *c;
}

// Circle equality up to roundoff; the cross maps require a shared circle.
void require_same_circle(const Circle& a, const Circle& b) {
  const double scale = 1.0 + a.radius;
  if (dist(a.center, b.center) > 1e-12 * scale ||
      std::abs(a.radius - b.radius) > 1e-12 * scale) {
    throw ValidationError("cross map requires chains inscribed in the same circle");
  }
}

}  // namespace

BoundaryChain extract_chain(const Mesh2D& m, BoundaryTag tag) {
  BoundaryChain chain;
  chain.tag = tag;
  chain.circle = circle_for(m, tag);
  const Vec2 c = chain.circle.center;

  struct RawEdge {
    double start_angle;
    int start_vertex, end_vertex;
    int tri;
    Vec2 a, b;       // chain-ordered endpoints
    Vec2 outward;    // from the mesh orientation, independent of chain order
  };
  std::vector<RawEdge> raw;
  for (const auto& e : m.boundary) {
    if (e.tag != tag) continue;
    RawEdge r;
    r.tri = e.tri;
    const Vec2 q0 = m.vertices[e.v0];
    const Vec2 q1 = m.vertices[e.v1];
    r.outward = perp_right(q1 - q0);
    const double len = norm(r.outward);
    if (len <= 0.0) throw NumericalError("degenerate boundary edge");
    r.outward = r.outward * (1.0 / len);
    const double a0 = angle_of(chain.circle, q0);
    const double a1 = angle_of(chain.circle, q1);
    // The chord subtends less than pi, so the CCW start is whichever endpoint
    // reaches the other within half a turn.
    if (wrap_angle(a1 - a0) < pi) {
      r.start_angle = a0;
      r.start_vertex = e.v0;
      r.end_vertex = e.v1;
      r.a = q0;
      r.b = q1;
    } else {
      r.start_angle = a1;
      r.start_vertex = e.v1;
      r.end_vertex = e.v0;
      r.a = q1;
      r.b = q0;
    }
    raw.push_back(r);
  }
  if (raw.empty()) throw ValidationError("mesh has no boundary edges with the requested tag");
  std::sort(raw.begin(), raw.end(),
            [](const RawEdge& x, const RawEdge& y) { return x.start_angle < y.start_angle; });

  const int n = static_cast<int>(raw.size());
  for (int e = 0; e < n; ++e) {
    const RawEdge& r = raw[e];
    if (r.end_vertex != raw[(e + 1) % n].start_vertex) {
      throw NumericalError("tagged boundary edges do not form a single loop in angle");
    }
    chain.vertex_ids.push_back(r.start_vertex);
    chain.vertex_angle.push_back(r.start_angle);
    chain.tri.push_back(r.tri);
    chain.p0.push_back(r.a);
    chain.p1.push_back(r.b);
    chain.edge_len.push_back(dist(r.a, r.b));
    const Vec2 d = r.b - r.a;
    chain.foot_dist.push_back(std::abs(cross(d, c - r.a)) / norm(d));
    chain.outward.push_back(r.outward);
  }

  const Vec2 mid = (chain.p0[0] + chain.p1[0]) * 0.5;
  chain.normal_sign = dot(chain.outward[0], mid - c) > 0.0 ? 1.0 : -1.0;
  for (int e = 0; e < n; ++e) {
    const Vec2 me = (chain.p0[e] + chain.p1[e]) * 0.5;
    const double sgn = dot(chain.outward[e], me - c) > 0.0 ? 1.0 : -1.0;
    if (sgn != chain.normal_sign) {
      throw NumericalError("inconsistent outward normal orientation along chain");
    }
  }
  return chain;
}

Vec2 eta(const BoundaryChain& chain, Vec2 xi) {
  const Vec2 d = xi - chain.circle.center;
  const double rho = norm(d);
  if (rho <= 0.0) throw ValidationError("eta is undefined at the circle center");
  return chain.circle.center + d * (chain.circle.radius / rho);
}

ChainPoint zeta(const BoundaryChain& chain, Vec2 circle_point) {
  const double theta = angle_of(chain.circle, circle_point);
  const auto& va = chain.vertex_angle;
  // Owning edge by half-open interval; angles before the first vertex belong
  // to the last edge, which wraps through 2*pi.
  int e;
  if (theta < va.front()) {
    e = chain.n_edges() - 1;
  } else {
    e = static_cast<int>(std::upper_bound(va.begin(), va.end(), theta) - va.begin()) - 1;
  }
  // Ray-chord intersection: c + t*u = p0 + s*(p1 - p0).
  const Vec2 u = circle_point - chain.circle.center;
  const Vec2 d = chain.p1[e] - chain.p0[e];
  const Vec2 b = chain.p0[e] - chain.circle.center;
  const double denom = cross(u, d);
  if (std::abs(denom) < 1e-30) throw NumericalError("chord is radial; zeta ill posed");
  double s = cross(b, u) / denom;
  if (s < -1e-9 || s > 1.0 + 1e-9) {
    throw NumericalError("zeta landed outside the owning edge");
  }
  s = std::clamp(s, 0.0, 1.0 - 1e-16);
  ChainPoint cp;
  cp.edge = e;
  cp.s = s;
  cp.p = chain.p0[e] + d * s;
  return cp;
}

ChainPoint cross_map(const BoundaryChain& from, const BoundaryChain& to, Vec2 xi) {
  require_same_circle(from.circle, to.circle);
  return zeta(to, eta(from, xi));
}

std::vector<double> pullback_breakpoints(const BoundaryChain& chain, int e,
                                         const BoundaryChain& other) {
  require_same_circle(chain.circle, other.circle);
  const double a0 = chain.vertex_angle[e];
  const double span = e + 1 < chain.n_edges()
                          ? chain.vertex_angle[e + 1] - a0
                          : chain.vertex_angle[0] + two_pi - a0;
  const Vec2 d = chain.p1[e] - chain.p0[e];
  const Vec2 b = chain.p0[e] - chain.circle.center;
  std::vector<double> params;
  for (const double phi : other.vertex_angle) {
    const double rel = wrap_angle(phi - a0);
    if (rel <= 0.0 || rel >= span) continue;
    // Ray-chord intersection at angle phi: c + t*u = p0 + s*d.
    const Vec2 u{std::cos(phi), std::sin(phi)};
    const double denom = cross(u, d);
    if (std::abs(denom) < 1e-30) throw NumericalError("chord is radial; pullback ill posed");
    const double s = cross(b, u) / denom;
    if (s > 1e-12 && s < 1.0 - 1e-12) params.push_back(s);
  }
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end(),
                           [](double x, double y) { return y - x < 1e-12; }),
               params.end());
  return params;
}

double cross_jacobian(const BoundaryChain& from, const BoundaryChain& to, Vec2 xi) {
  require_same_circle(from.circle, to.circle);
  const Vec2 circle_pt = eta(from, xi);
  const ChainPoint src = zeta(from, circle_pt);  // locates the owning source edge
  const ChainPoint dst = zeta(to, circle_pt);
  const double rho_from = dist(xi, from.circle.center);
  const double rho_to = dist(dst.p, to.circle.center);
  const double d_from = from.foot_dist[src.edge];
  const double d_to = to.foot_dist[dst.edge];
  if (d_from <= 0.0 || d_to <= 0.0) throw NumericalError("chord passes through the center");
  return (d_from / (rho_from * rho_from)) * ((rho_to * rho_to) / d_to);
}

double max_projection_offset(const BoundaryChain& chain) {
  const Vec2 c = chain.circle.center;
  const double r = chain.circle.radius;
  double best = 0.0;
  for (int e = 0; e < chain.n_edges(); ++e) {
    const Vec2 d = chain.p1[e] - chain.p0[e];
    const double len2 = dot(d, d);
    const double t = std::clamp(dot(c - chain.p0[e], d) / len2, 0.0, 1.0);
    const double rho_min = dist(chain.p0[e] + d * t, c);
    best = std::max(best, r - rho_min);
  }
  return best;
}

}  // namespace pefem

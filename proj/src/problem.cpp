#include "pefem/problem.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "pefem/errors.hpp"

namespace pefem {

namespace {

struct Term {
  int a, b;
  double c;
};

// Dense polynomial with analytic gradient and Laplacian, shared by the
// generic patch cases.
struct Poly2 {
  std::vector<Term> terms;

  double value(Vec2 p) const {
    double s = 0.0;
    for (const Term& t : terms) s += t.c * std::pow(p.x, t.a) * std::pow(p.y, t.b);
    return s;
  }
  Vec2 grad(Vec2 p) const {
    Vec2 g;
    for (const Term& t : terms) {
      if (t.a > 0) g.x += t.c * t.a * std::pow(p.x, t.a - 1) * std::pow(p.y, t.b);
      if (t.b > 0) g.y += t.c * t.b * std::pow(p.x, t.a) * std::pow(p.y, t.b - 1);
    }
    return g;
  }
  double laplacian(Vec2 p) const {
    double s = 0.0;
    for (const Term& t : terms) {
      if (t.a >= 2) s += t.c * t.a * (t.a - 1) * std::pow(p.x, t.a - 2) * std::pow(p.y, t.b);
      if (t.b >= 2) s += t.c * t.b * (t.b - 1) * std::pow(p.x, t.a) * std::pow(p.y, t.b - 2);
    }
    return s;
  }
};

Poly2 generic_poly(int order) {
  Poly2 p;
  p.terms = {{0, 0, 0.5}, {1, 0, 1.25}, {0, 1, -0.75}};
  if (order >= 2) {
    p.terms.insert(p.terms.end(), {{2, 0, 0.6}, {1, 1, -1.1}, {0, 2, 0.4}});
  }
  if (order >= 3) {
    p.terms.insert(p.terms.end(), {{3, 0, 0.35}, {2, 1, 0.2}, {1, 2, -0.5}, {0, 3, 0.15}});
  }
  if (order >= 4) {
    p.terms.insert(p.terms.end(),
                   {{4, 0, 0.12}, {3, 1, -0.3}, {2, 2, 0.25}, {1, 3, 0.08}, {0, 4, -0.1}});
  }
  return p;
}

// Polynomial in r^2: c0 + c1 r^2 + c2 r^4.
SideData radial_side(double p, double c0, double c1, double c2) {
  SideData s;
  s.p = p;
  s.u = [=](Vec2 q) {
    const double r2 = q.x * q.x + q.y * q.y;
    return c0 + c1 * r2 + c2 * r2 * r2;
  };
  s.grad_u = [=](Vec2 q) {
    const double r2 = q.x * q.x + q.y * q.y;
    const double d = 2.0 * c1 + 4.0 * c2 * r2;
    return Vec2{d * q.x, d * q.y};
  };
  s.f = [=](Vec2 q) {
    const double r2 = q.x * q.x + q.y * q.y;
    return -p * (4.0 * c1 + 16.0 * c2 * r2);
  };
  return s;
}

InterfaceProblem build_gaussian() {
  InterfaceProblem ip;
  ip.name = "gaussian_disk_annulus";
  auto core = [](Vec2 q) { return std::exp(-5.0 * (q.x * q.x + q.y * q.y)); };
  const double shift = std::exp(-5.0 / 16.0);

  ip.side[0].p = 1.0;
  ip.side[0].u = core;
  ip.side[0].grad_u = [=](Vec2 q) { return Vec2{q.x, q.y} * (-10.0 * core(q)); };
  ip.side[0].f = [=](Vec2 q) {
    const double r2 = q.x * q.x + q.y * q.y;
    return (20.0 - 100.0 * r2) * core(q);
  };

  ip.side[1].p = 2.0;
  ip.side[1].u = [=](Vec2 q) { return 0.5 * (core(q) + shift); };
  ip.side[1].grad_u = [=](Vec2 q) { return Vec2{q.x, q.y} * (-5.0 * core(q)); };
  ip.side[1].f = ip.side[0].f;  // -p2 * laplace(u2) collapses to the same field

  ip.outer_data = ip.side[1].u;
  return ip;
}

}  // namespace

const InterfaceProblem& manufactured_case(const std::string& name) {
  static const std::map<std::string, InterfaceProblem> cases = {
      {"gaussian_disk_annulus", build_gaussian()}};
  const auto it = cases.find(name);
  if (it == cases.end()) throw ValidationError("unknown manufactured case: " + name);
  return it->second;
}

InterfaceProblem polynomial_patch_case(int order, const std::string& kind) {
  if (order < 1 || order > 4) throw ValidationError("patch case order must be in 1..4");
  InterfaceProblem ip;
  if (kind == "generic") {
    ip.name = "patch_generic";
    const Poly2 poly = generic_poly(order);
    for (SideData& s : ip.side) {
      s.p = 1.0;
      s.u = [poly](Vec2 q) { return poly.value(q); };
      s.grad_u = [poly](Vec2 q) { return poly.grad(q); };
      s.f = [poly](Vec2 q) { return -poly.laplacian(q); };
    }
  } else if (kind == "radial_unit") {
    // One global radial polynomial with unit diffusion on both sides; stays
    // exactly reproducible even when the two interface chains differ.
    ip.name = "patch_radial_unit";
    const double a1 = order >= 2 ? 1.2 : 0.0;
    const double a2 = order >= 4 ? -0.9 : 0.0;
    ip.side[0] = radial_side(1.0, 0.3, a1, a2);
    ip.side[1] = radial_side(1.0, 0.3, a1, a2);
  } else if (kind == "radial") {
    ip.name = "patch_radial";
    const double p1 = 1.0, p2 = 2.0;
    const double a1 = order >= 2 ? 1.2 : 0.0;
    const double a2 = order >= 4 ? -0.9 : 0.0;
    const double b1 = p1 / p2 * a1;
    const double b2 = p1 / p2 * a2;
    const double r2 = 1.0 / 16.0;  // interface radius squared
    const double a0 = 0.3;
    const double b0 = a0 + (a1 - b1) * r2 + (a2 - b2) * r2 * r2;
    ip.side[0] = radial_side(p1, a0, a1, a2);
    ip.side[1] = radial_side(p2, b0, b1, b2);
  } else {
    throw ValidationError("unknown patch case kind: " + kind);
  }
  ip.outer_data = ip.side[1].u;
  return ip;
}

}  // namespace pefem

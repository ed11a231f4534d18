#pragma once

#include <functional>
#include <string>

#include "pefem/geometry.hpp"

namespace pefem {

// Data of one subdomain: constant diffusion and analytic fields valid in the
// whole plane, so polytopial domains may poke outside the exact subdomain.
struct SideData {
  double p = 1.0;
  std::function<double(Vec2)> u;
  std::function<Vec2(Vec2)> grad_u;
  std::function<double(Vec2)> f;  // f = -p * laplace(u)
};

// -div(p_i grad u_i) = f_i on the disk (side 0) and annulus (side 1), with
// continuity of u and of the conormal flux across the interface circle and
// Dirichlet data on the outer circle.
struct InterfaceProblem {
  std::string name;
  Circle interface{{0.0, 0.0}, 0.25};
  double outer_radius = 0.5;
  SideData side[2];
  std::function<double(Vec2)> outer_data;
};

// Registry of named manufactured solutions; currently "gaussian_disk_annulus".
const InterfaceProblem& manufactured_case(const std::string& name);

// Exact polynomial solutions for discrete reproduction checks. kind "generic"
// is a dense degree-k polynomial shared by both sides (requires p1 = p2);
// kind "radial" is a polynomial in r^2 with side coefficients scaled by
// p1/p2 so the interface flux balances (constant for order 1).
InterfaceProblem polynomial_patch_case(int order, const std::string& kind);

}  // namespace pefem

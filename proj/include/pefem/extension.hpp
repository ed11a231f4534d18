#pragma once

#include <functional>

#include <Eigen/Dense>

#include "pefem/fe_space.hpp"
#include "pefem/interface_map.hpp"

namespace pefem {

// One extension evaluation at a boundary quadrature point: the element
// polynomial of the edge's adjacent element, continued to the circle point
// eta(xi). |offset| is bounded by the chain's projection offset and the
// mapped point lies on the circle to roundoff.
struct ExtensionEvaluation {
  int edge = -1;
  Vec2 xi;
  Vec2 mapped;
  Vec2 offset;
  double value = 0.0;
};

// Adjacent-element polynomial continued to eta(xi) (production form).
double taylor_value(const FeSpace& space, const BoundaryChain& chain, int edge,
                    const Eigen::VectorXd& u, Vec2 xi);

ExtensionEvaluation taylor_extension_detail(const FeSpace& space, const BoundaryChain& chain,
                                            int edge, const Eigen::VectorXd& u, Vec2 xi);

// Derivative-sum Taylor form: sum_{|a| <= k} D^a u(xi) (eta(xi)-xi)^a / a!.
// Equal to taylor_value for polynomial data; kept as a cross-check oracle.
double taylor_value_sum(const FeSpace& space, const BoundaryChain& chain, int edge,
                        const Eigen::VectorXd& u, Vec2 xi);

// Derivative sum restricted to k_start <= |a| <= k.
double taylor_value_truncated(const FeSpace& space, const BoundaryChain& chain, int edge,
                              const Eigen::VectorXd& u, Vec2 xi, int k_start);

enum class NormalChoice { Exact, Discrete };

// Extended co-normal derivative. Exact: p(eta(xi)) grad_u|_eta . n with n the
// outward unit circle normal of the chain's side; Discrete: p(xi) grad_u(xi)
// dotted with the polygon edge's outward normal.
double extended_conormal(const FeSpace& space, const BoundaryChain& chain, int edge,
                         const Eigen::VectorXd& u, Vec2 xi,
                         const std::function<double(Vec2)>& coefficient, NormalChoice normal);

}  // namespace pefem

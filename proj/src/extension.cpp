#include "pefem/extension.hpp"

#include <cmath>

#include "pefem/errors.hpp"

namespace pefem {

namespace {

void check_edge(const BoundaryChain& chain, int edge) {
  if (edge < 0 || edge >= chain.n_edges()) throw ValidationError("chain edge out of range");
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double taylor_value(const FeSpace& space, const BoundaryChain& chain, int edge,
                    const Eigen::VectorXd& u, Vec2 xi) {
  check_edge(chain, edge);
  return space.value(u, chain.tri[edge], eta(chain, xi));
}

ExtensionEvaluation taylor_extension_detail(const FeSpace& space, const BoundaryChain& chain,
                                            int edge, const Eigen::VectorXd& u, Vec2 xi) {
  check_edge(chain, edge);
  ExtensionEvaluation ev;
  ev.edge = edge;
  ev.xi = xi;
  ev.mapped = eta(chain, xi);
  ev.offset = ev.mapped - xi;
  ev.value = space.value(u, chain.tri[edge], ev.mapped);
  return ev;
}

double taylor_value_sum(const FeSpace& space, const BoundaryChain& chain, int edge,
                        const Eigen::VectorXd& u, Vec2 xi) {
  return taylor_value_truncated(space, chain, edge, u, xi, 0);
}

double taylor_value_truncated(const FeSpace& space, const BoundaryChain& chain, int edge,
                              const Eigen::VectorXd& u, Vec2 xi, int k_start) {
  check_edge(chain, edge);
  const int k = space.order();
  if (k_start < 0 || k_start > k) throw ValidationError("taylor truncation start out of range");
  const int tri = chain.tri[edge];
  const Vec2 d = eta(chain, xi) - xi;
  double sum = 0.0;
  for (int total = k_start; total <= k; ++total) {
    for (int b = 0; b <= total; ++b) {
      const int a = total - b;
      sum += space.derivative(u, tri, a, b, xi) * std::pow(d.x, a) * std::pow(d.y, b) /
             (factorial(a) * factorial(b));
    }
  }
  return sum;
}

double extended_conormal(const FeSpace& space, const BoundaryChain& chain, int edge,
                         const Eigen::VectorXd& u, Vec2 xi,
                         const std::function<double(Vec2)>& coefficient, NormalChoice normal) {
  check_edge(chain, edge);
  const int tri = chain.tri[edge];
  if (normal == NormalChoice::Discrete) {
    const Vec2 g = space.gradient(u, tri, xi);
    return coefficient(xi) * dot(g, chain.outward[edge]);
  }
  const Vec2 mapped = eta(chain, xi);
  // The element gradient is one degree lower; its continuation to the circle
  // point is the vector Taylor extension.
  const Vec2 g = space.gradient(u, tri, mapped);
  const Vec2 n = (mapped - chain.circle.center) * (chain.normal_sign / chain.circle.radius);
  return coefficient(mapped) * dot(g, n);
}

}  // namespace pefem

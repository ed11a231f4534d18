#include "pefem/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "pefem/errors.hpp"
#include "pefem/extension.hpp"
#include "pefem/interface_map.hpp"
#include "pefem/quadrature.hpp"

namespace pefem {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

void require_record_shape(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size()) throw ValidationError("rate fit needs matching h/error lengths");
  if (h.size() < 3) throw ValidationError("rate fit needs at least 3 levels");
  for (size_t i = 0; i + 1 < h.size(); ++i) {
    if (h[i + 1] >= h[i]) throw ValidationError("rate fit needs strictly decreasing h");
  }
  for (const double hi : h) {
    if (hi <= 0.0) throw ValidationError("rate fit needs positive h");
  }
}

}  // namespace

ErrorNorms broken_error(const FeSpace& space, const Eigen::VectorXd& u,
                        const std::function<double(Vec2)>& exact,
                        const std::function<Vec2(Vec2)>& exact_grad) {
  if (u.size() != space.n_dofs()) throw ValidationError("dof vector does not match the space");
  const int k = space.order();
  const ReferenceElement& re = reference_element(k);
  const TriangleRule& rule = triangle_quadrature(std::min(10, 2 * k + 2));
  const int nq = static_cast<int>(rule.points.size());

  std::vector<std::vector<double>> shape(nq, std::vector<double>(re.ndof));
  std::vector<std::vector<Vec2>> ref_grad(nq, std::vector<Vec2>(re.ndof));
  for (int q = 0; q < nq; ++q) {
    const Vec2 rp{rule.points[q].x, rule.points[q].y};
    for (int i = 0; i < re.ndof; ++i) {
      shape[q][i] = re.shape(i, rp);
      ref_grad[q][i] = {re.shape_deriv(i, 1, 0, rp), re.shape_deriv(i, 0, 1, rp)};
    }
  }

  double l2_sq = 0.0, semi_sq = 0.0;
  for (int t = 0; t < static_cast<int>(space.mesh().triangles.size()); ++t) {
    const ElementMap& em = space.map_of(t);
    const auto& dofs = space.cell_dofs(t);
    for (int q = 0; q < nq; ++q) {
      double uh = 0.0;
      Vec2 gh_ref{0.0, 0.0};
      for (int i = 0; i < re.ndof; ++i) {
        const double c = u[dofs[i]];
        uh += c * shape[q][i];
        gh_ref = gh_ref + ref_grad[q][i] * c;
      }
      const Vec2 gh{em.binv[0][0] * gh_ref.x + em.binv[1][0] * gh_ref.y,
                    em.binv[0][1] * gh_ref.x + em.binv[1][1] * gh_ref.y};
      const Vec2 x = to_physical(em, {rule.points[q].x, rule.points[q].y});
      const double wq = rule.points[q].w * em.det;
      const double dv = uh - exact(x);
      const Vec2 dg = gh - exact_grad(x);
      l2_sq += wq * dv * dv;
      semi_sq += wq * dot(dg, dg);
    }
  }
  ErrorNorms n;
  n.l2 = std::sqrt(l2_sq);
  n.h1_semi = std::sqrt(semi_sq);
  n.h1 = std::sqrt(l2_sq + semi_sq);
  return n;
}

ErrorNorms combine_norms(const ErrorNorms& a, const ErrorNorms& b) {
  ErrorNorms n;
  n.l2 = std::hypot(a.l2, b.l2);
  n.h1_semi = std::hypot(a.h1_semi, b.h1_semi);
  n.h1 = std::hypot(a.h1, b.h1);
  return n;
}

RateSummary fit_rate(const std::vector<double>& h, const std::vector<double>& errors) {
  require_record_shape(h, errors);
  RateSummary r;
  for (const double e : errors) {
    if (e <= 0.0) {
      r.exact = true;
      return r;
    }
  }
  const int n = static_cast<int>(h.size());
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += std::log(h[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / n, my = sy / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    num += dx * (std::log(errors[i]) - my);
    den += dx * dx;
  }
  r.least_squares = num / den;
  r.last_interval =
      std::log(errors[n - 2] / errors[n - 1]) / std::log(h[n - 2] / h[n - 1]);
  return r;
}

void write_convergence_csv(std::ostream& out, const ConvergenceRecord& record) {
  out << format_convergence_csv(record);
}

std::string format_convergence_csv(const ConvergenceRecord& record) {
  if (record.h.size() != record.l2_error.size() || record.h.size() != record.h1_error.size()) {
    throw ValidationError("convergence record has mismatched column lengths");
  }
  std::ostringstream out;
  out << "h,l2_error,h1_error\n";
  for (int i = 0; i < record.levels(); ++i) {
    out << sci(record.h[i]) << ',' << sci(record.l2_error[i]) << ',' << sci(record.h1_error[i])
        << '\n';
  }
  const RateSummary l2 = fit_rate(record.h, record.l2_error);
  const RateSummary h1 = fit_rate(record.h, record.h1_error);
  out << "rate," << (l2.exact ? "exact" : sci(l2.least_squares)) << ','
      << (h1.exact ? "exact" : sci(h1.least_squares)) << '\n';
  return out.str();
}

double flux_imbalance(const FeSpace& s1, const TraceSpace& w1, const Eigen::VectorXd& u1,
                      double p1, const FeSpace& s2, const TraceSpace& w2,
                      const Eigen::VectorXd& u2, double p2, int gauss_points) {
  const BoundaryChain& c1 = w1.chain();
  const BoundaryChain& c2 = w2.chain();
  const Circle circ = c1.circle;
  const int np = gauss_points > 0 ? gauss_points : std::max(s1.order(), s2.order()) + 2;
  const auto& gauss = edge_gauss(np);

  // The integrand is piecewise smooth in angle with kinks at either chain's
  // vertices; integrate per subinterval of the merged breakpoint list.
  std::vector<double> breaks;
  breaks.insert(breaks.end(), c1.vertex_angle.begin(), c1.vertex_angle.end());
  breaks.insert(breaks.end(), c2.vertex_angle.begin(), c2.vertex_angle.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               breaks.end());
  breaks.push_back(breaks.front() + two_pi);

  auto pfun1 = [p1](Vec2) { return p1; };
  auto pfun2 = [p2](Vec2) { return p2; };
  double acc = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double width = breaks[i + 1] - breaks[i];
    if (width < 1e-14) continue;
    for (const auto& gp : gauss) {
      const double phi = breaks[i] + width * gp.t;
      const Vec2 x = circ.center + Vec2{std::cos(phi), std::sin(phi)} * circ.radius;
      const ChainPoint q1 = zeta(c1, x);
      const ChainPoint q2 = zeta(c2, x);
      const double sum = extended_conormal(s1, c1, q1.edge, u1, q1.p, pfun1, NormalChoice::Exact) +
                         extended_conormal(s2, c2, q2.edge, u2, q2.p, pfun2, NormalChoice::Exact);
      acc += gp.w * width * circ.radius * sum * sum;
    }
  }
  return std::sqrt(acc);
}

}  // namespace pefem

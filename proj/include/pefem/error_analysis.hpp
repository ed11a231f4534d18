#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pefem/fe_space.hpp"
#include "pefem/geometry.hpp"

namespace pefem {

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1 = 0.0;  // sqrt(l2^2 + h1_semi^2)
};

// Element-wise error of the discrete field against an analytically extended
// exact field, integrated over the polytopial domain.
ErrorNorms broken_error(const FeSpace& space, const Eigen::VectorXd& u,
                        const std::function<double(Vec2)>& exact,
                        const std::function<Vec2(Vec2)>& exact_grad);

// Root-sum-of-squares combination of two subdomain errors.
ErrorNorms combine_norms(const ErrorNorms& a, const ErrorNorms& b);

// One convergence table: levels sorted by strictly decreasing h.
struct ConvergenceRecord {
  std::vector<double> h;
  std::vector<double> l2_error;
  std::vector<double> h1_error;
  int levels() const { return static_cast<int>(h.size()); }
};

struct RateSummary {
  double least_squares = 0.0;
  double last_interval = 0.0;
  bool exact = false;  // an error vanished (exact reproduction); slopes meaningless
};

// Log-log slope of errors against h, both as a least-squares fit over all
// levels and over the final interval. Requires >= 3 levels.
RateSummary fit_rate(const std::vector<double>& h, const std::vector<double>& errors);

// CSV layout: header h,l2_error,h1_error; one row per level; a final row
// rate,<l2_rate>,<h1_rate> carrying the least-squares fits (or "exact").
void write_convergence_csv(std::ostream& out, const ConvergenceRecord& record);
std::string format_convergence_csv(const ConvergenceRecord& record);

// L2 norm over the curved interface of the two-sided extended co-normal flux
// sum; both fields are evaluated at the same exact-curve points through their
// own chains. Decays with refinement when the fluxes balance.
double flux_imbalance(const FeSpace& s1, const TraceSpace& w1, const Eigen::VectorXd& u1,
                      double p1, const FeSpace& s2, const TraceSpace& w2,
                      const Eigen::VectorXd& u2, double p2, int gauss_points = 0);

}  // namespace pefem

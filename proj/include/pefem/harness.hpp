#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pefem/assembly.hpp"
#include "pefem/error_analysis.hpp"
#include "pefem/fe_space.hpp"
#include "pefem/interface_map.hpp"
#include "pefem/mesh.hpp"
#include "pefem/problem.hpp"
#include "pefem/solver.hpp"

namespace pefem {

// Interface edge-count ratio side1:side2; level l uses base * side * 2^l edges.
struct Ratio {
  int side1 = 1;
  int side2 = 1;
  std::string label() const;  // "1:2"
};

Ratio parse_ratio(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);  // "2,3,4"

struct StudyConfig {
  std::string problem = "gaussian_disk_annulus";
  std::vector<int> orders{2, 3, 4};
  std::vector<Ratio> ratios{{1, 1}, {1, 2}, {2, 1}};
  int base_edges = 8;
  int levels = 4;
  double c_theta = 0.0;         // 0 selects the default 10 * max diffusion
  double theta_exponent = 1.0;  // theta = c_theta / h^exponent
  int edge_points = 0;          // 0 selects order + 2 Gauss points per edge
  std::string solver = "direct";
  double solver_tol = 1e-12;
  std::string out_dir = "out";

  CoupledOptions coupling_options() const;
  SolveOptions solve_options() const;
};

void validate_config(const StudyConfig& config);
StudyConfig config_from_json(const std::string& json_text);
StudyConfig load_config_file(const std::string& path);

// Problem registry lookup: manufactured cases by name, or the polynomial
// patch families "patch_generic", "patch_radial", "patch_radial_unit" built
// at the requested order.
InterfaceProblem resolve_problem(const std::string& name, int order);

// One solved refinement level of the coupled problem.
struct LevelSolution {
  Mesh2D mesh1, mesh2;
  std::unique_ptr<FeSpace> s1, s2;
  std::unique_ptr<TraceSpace> w1, w2, outer;
  CoupledSystem sys;
  Eigen::VectorXd x;
  SolveReport report;

  Eigen::VectorXd u1() const { return x.segment(sys.off_u1, s1->n_dofs()); }
  Eigen::VectorXd u2() const { return x.segment(sys.off_u2, s2->n_dofs()); }
  Eigen::VectorXd lambda() const { return x.segment(sys.off_lambda, w1->n_dofs()); }
  Eigen::VectorXd rho() const { return x.segment(sys.off_rho, w2->n_dofs()); }
};

std::unique_ptr<LevelSolution> solve_level(const InterfaceProblem& prob, int order, int n1,
                                           int n2, const CoupledOptions& copt = {},
                                           const SolveOptions& sopt = {});

struct LevelMetrics {
  double h = 0.0;  // largest element diameter across the mesh pair
  ErrorNorms error;
  double lambda_identity = 0.0;  // relative gap to the projected side-1 extension trace
  double flux_imbalance = 0.0;
  int dofs = 0;
};

LevelMetrics measure_level(const LevelSolution& level, const InterfaceProblem& prob);

struct StudyRecord {
  std::string problem;
  int order = 0;
  Ratio ratio;
  ConvergenceRecord record;
  RateSummary l2_rate, h1_rate;
  std::vector<LevelMetrics> metrics;
  std::string csv_path;
  bool ok = false;
  std::string message;  // failure reason when !ok
};

// Runs every (order, ratio) combination; a failed combination is logged and
// recorded but does not abort the others. Writes one CSV per combination and
// a combined summary table into config.out_dir.
std::vector<StudyRecord> run_study(const StudyConfig& config, std::ostream& log);

std::string format_summary(const StudyConfig& config, const std::vector<StudyRecord>& records);

// Solves one instance and writes vertex tables (x,y,u_h,u_exact per side)
// plus interface tables for the lambda/rho coefficients.
void run_single(const StudyConfig& config, int order, const Ratio& ratio, int level,
                std::ostream& log);

// Cross-map diagnostics over a nonmatching chain family: round trips, chord
// sagitta, Jacobian bounds and finite-difference agreement per level.
std::string check_geometry_report(int base_edges, int levels);

}  // namespace pefem

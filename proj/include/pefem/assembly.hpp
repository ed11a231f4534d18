#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "pefem/fe_space.hpp"
#include "pefem/problem.hpp"

namespace pefem {

// Stiffness a(w, v) = int p grad w . grad v; symmetric positive semidefinite.
Eigen::SparseMatrix<double> assemble_stiffness(const FeSpace& space, double p);

// Load <f, v> with a quadrature rule two degrees above stiffness exactness.
Eigen::VectorXd assemble_load(const FeSpace& space, const std::function<double(Vec2)>& f);

// Penalty pairing int T^k w|_eta(xi) v(xi) ds over the chain, rows in volume
// test indices (nonzero only for dofs living on the chain), columns volume.
Eigen::SparseMatrix<double> assemble_taylor_boundary(const FeSpace& space, const TraceSpace& w,
                                                     int gauss_points = 0);

// <mu, v> over the chain; rows volume test dofs, columns trace dofs.
Eigen::SparseMatrix<double> assemble_trace_pairing_volume(const FeSpace& space,
                                                          const TraceSpace& w);

// <mu_trial pulled back through the cross map, v_test> integrated on the test
// chain; rows volume dofs of the test side, columns trial trace dofs.
Eigen::SparseMatrix<double> assemble_cross_pairing_volume(const FeSpace& space,
                                                          const TraceSpace& test_w,
                                                          const TraceSpace& trial_w,
                                                          int gauss_points = 0);

// Same pullback pairing with trace-space test rows instead of volume rows.
Eigen::SparseMatrix<double> assemble_cross_pairing(const TraceSpace& test_w,
                                                   const TraceSpace& trial_w,
                                                   int gauss_points = 0);

// tau(w, mu) = <p grad w|_eta . n - p grad w . n_h, mu>: the mismatch between
// the extended conormal flux on the circle and the discrete one on the chord.
// Rows trace dofs, columns volume dofs.
Eigen::SparseMatrix<double> assemble_tau(const FeSpace& space, const TraceSpace& w, double p,
                                         int gauss_points = 0);

// <g(eta(xi)), v> over the chain, rows in volume test indices.
Eigen::VectorXd assemble_boundary_data_rhs(const FeSpace& space, const TraceSpace& w,
                                           const std::function<double(Vec2)>& g,
                                           int gauss_points = 0);

struct CoupledOptions {
  double c_theta = 0.0;         // 0 selects the default 10 * max diffusion
  double theta_exponent = 1.0;  // theta = c_theta / h^exponent
  int edge_points = 0;          // 0 selects order + 2 Gauss points per edge
};

// Single-domain weak Dirichlet operator: interior rows a(w, v), chain rows
// theta <T^k w|_eta, v>; rhs <f, v> on interior rows, theta <g-of-eta, v> on
// chain rows.
struct DirichletSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  double theta = 0.0;
};

DirichletSystem assemble_dirichlet_system(const FeSpace& space,
                                          const std::vector<const TraceSpace*>& chains, double p,
                                          const std::function<double(Vec2)>& f,
                                          const std::function<double(Vec2)>& g,
                                          const CoupledOptions& opt = {});

// Four-field coupled system over [u1 | u2 | lambda | rho].
struct CoupledSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  int off_u1 = 0, off_u2 = 0, off_lambda = 0, off_rho = 0;
  int dim = 0;
  double theta1 = 0.0, theta2 = 0.0;

  std::string block_name(int index) const;
};

// Rows: side-1 and side-2 weak Dirichlet equations (interior stiffness rows,
// chain penalty rows coupling to lambda, outer-data penalty rows on side 2),
// then the two Neumann equations tested with lifted interface traces, where
// rho enters with opposite signs and tau carries the flux-extension mismatch.
CoupledSystem build_coupled_system(const FeSpace& space1, const TraceSpace& w1,
                                   const FeSpace& space2, const TraceSpace& w2,
                                   const TraceSpace& outer2, const InterfaceProblem& prob,
                                   const CoupledOptions& opt = {});

}  // namespace pefem

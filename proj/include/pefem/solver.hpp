#pragma once

#include <functional>
#include <string>
#include <utility>

#include <Eigen/Sparse>

#include "pefem/errors.hpp"

namespace pefem {

struct SolveOptions {
  std::string method = "direct";  // "direct" or "iterative"
  double tol = 1e-12;             // iterative convergence target
  int max_iterations = 10000;
};

struct SolveReport {
  std::string method;
  double relative_residual = 0.0;  // recomputed from scratch after the solve
  int iterations = 0;              // refinement steps (direct) or Krylov iterations
  double seconds = 0.0;
};

// Names a row for diagnostics; index -> human-readable block description.
using RowLabeler = std::function<std::string(int)>;

// Solves the sparse nonsymmetric system with row/column equilibration.
// Direct path: sparse LU plus iterative refinement; iterative path: BiCGSTAB
// with an incomplete-LU preconditioner. Throws NumericalError on empty rows
// or columns (named via the labeler), singular factorizations, and
// non-convergence.
std::pair<Eigen::VectorXd, SolveReport> solve_sparse(const Eigen::SparseMatrix<double>& a,
                                                     const Eigen::VectorXd& b,
                                                     const SolveOptions& options = {},
                                                     const RowLabeler& labeler = nullptr);

}  // namespace pefem

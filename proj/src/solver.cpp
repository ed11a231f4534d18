#include "pefem/solver.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace pefem {

namespace {

std::string row_name(const RowLabeler& labeler, int i) {
  return labeler ? labeler(i) : "row " + std::to_string(i);
}

// Symmetric equilibration by inverse square roots of row/column max moduli;
// returns scaled copy a' = R a C with the factors.
Eigen::SparseMatrix<double> equilibrate(const Eigen::SparseMatrix<double>& a,
                                        Eigen::VectorXd& row_scale, Eigen::VectorXd& col_scale,
                                        const RowLabeler& labeler) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd row_max = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd col_max = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      const double v = std::abs(it.value());
      row_max[it.row()] = std::max(row_max[it.row()], v);
      col_max[it.col()] = std::max(col_max[it.col()], v);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (row_max[i] == 0.0) {
      throw NumericalError("empty matrix row at " + row_name(labeler, i));
    }
    if (col_max[i] == 0.0) {
      throw NumericalError("empty matrix column at " + row_name(labeler, i));
    }
  }
  row_scale = row_max.cwiseSqrt().cwiseInverse();
  col_scale = col_max.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> scaled = a;
  for (int k = 0; k < scaled.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(scaled, k); it; ++it) {
      it.valueRef() *= row_scale[it.row()] * col_scale[it.col()];
    }
  }
  return scaled;
}

}  // namespace

std::pair<Eigen::VectorXd, SolveReport> solve_sparse(const Eigen::SparseMatrix<double>& a,
                                                     const Eigen::VectorXd& b,
                                                     const SolveOptions& options,
                                                     const RowLabeler& labeler) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw ValidationError("solver dimensions are inconsistent");
  }
  if (options.method != "direct" && options.method != "iterative") {
    throw ValidationError("unknown solver method: " + options.method);
  }
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.method = options.method;

  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {Eigen::VectorXd::Zero(b.size()), report};
  }

  Eigen::VectorXd row_scale, col_scale;
  const Eigen::SparseMatrix<double> scaled = equilibrate(a, row_scale, col_scale, labeler);
  Eigen::VectorXd x;

  if (options.method == "direct") {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(scaled);
    lu.factorize(scaled);
    if (lu.info() != Eigen::Success) {
      throw NumericalError("sparse LU factorization failed (" + lu.lastErrorMessage() + ")");
    }
    x = col_scale.asDiagonal() * Eigen::VectorXd(lu.solve(row_scale.asDiagonal() * b));
    // Two refinement passes knock the residual down to near roundoff.
    for (int it = 0; it < 2; ++it) {
      const Eigen::VectorXd r = b - a * x;
      x += col_scale.asDiagonal() * Eigen::VectorXd(lu.solve(row_scale.asDiagonal() * r));
      ++report.iterations;
    }
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
    krylov.setTolerance(options.tol);
    krylov.setMaxIterations(options.max_iterations);
    krylov.compute(scaled);
    if (krylov.info() != Eigen::Success) {
      throw NumericalError("incomplete-LU preconditioner construction failed");
    }
    const Eigen::VectorXd y = krylov.solve(row_scale.asDiagonal() * b);
    report.iterations = static_cast<int>(krylov.iterations());
    if (krylov.info() != Eigen::Success) {
      throw NumericalError("iterative solver stalled after " +
                           std::to_string(krylov.iterations()) +
                           " iterations, error estimate " + std::to_string(krylov.error()));
    }
    x = col_scale.asDiagonal() * y;
  }

  report.relative_residual = (b - a * x).norm() / bnorm;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {x, report};
}

}  // namespace pefem

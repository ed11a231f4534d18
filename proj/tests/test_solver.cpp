#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "pefem/solver.hpp"

using namespace pefem;

namespace {

Eigen::SparseMatrix<double> laplacian_1d(int n) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, 2.0);
    if (i > 0) trips.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) trips.emplace_back(i, i + 1, -1.0);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

}  // namespace

TEST_CASE("identity system returns the rhs") {
  Eigen::SparseMatrix<double> a(4, 4);
  a.setIdentity();
  Eigen::VectorXd b(4);
  b << 1.0, -2.0, 0.5, 3.0;
  const auto [x, rep] = solve_sparse(a, b);
  CHECK((x - b).norm() <= 1e-14);
  CHECK(rep.relative_residual <= 1e-14);
  CHECK(rep.method == "direct");
}

TEST_CASE("zero rhs yields the zero solution without factorizing") {
  const auto a = laplacian_1d(50);
  const auto [x, rep] = solve_sparse(a, Eigen::VectorXd::Zero(50));
  CHECK(x.norm() == 0.0);
  CHECK(rep.relative_residual == 0.0);
}

TEST_CASE("direct and iterative paths agree on a stiff nonsymmetric system") {
  const int n = 200;
  auto a = laplacian_1d(n);
  // Badly scaled rows and an advection-like skew make equilibration matter.
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i) {
    const double s = (i % 7 == 0) ? 1e6 : 1.0;
    trips.emplace_back(i, i, 2.0 * s);
    if (i > 0) trips.emplace_back(i, i - 1, (-1.0 + 0.2) * s);
    if (i + 1 < n) trips.emplace_back(i, i + 1, (-1.0 - 0.2) * s);
  }
  a.setFromTriplets(trips.begin(), trips.end());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dis(-1.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = dis(rng);

  const auto [xd, repd] = solve_sparse(a, b);
  // With 1e6-scaled rows the meaningful target is the backward error, not
  // the plain relative residual (whose floor here is eps * |A| * |x| / |b|).
  const double norm_a = 1e6 * 3.2;
  const auto backward = [&](const Eigen::VectorXd& x) {
    return (b - a * x).lpNorm<Eigen::Infinity>() /
           (norm_a * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
  };
  CHECK(backward(xd) <= 1e-14);

  SolveOptions it;
  it.method = "iterative";
  const auto [xi, repi] = solve_sparse(a, b, it);
  CHECK(backward(xi) <= 1e-12);
  CHECK((xd - xi).norm() / xd.norm() <= 1e-6);
  CHECK(repi.iterations >= 1);

  // A well-scaled system reaches the plain relative-residual target.
  const auto lap = laplacian_1d(n);
  const auto [xl, repl] = solve_sparse(lap, b);
  CHECK(repl.relative_residual <= 1e-12);
}

TEST_CASE("structural defects are reported by row") {
  Eigen::SparseMatrix<double> a(3, 3);
  std::vector<Eigen::Triplet<double>> trips = {{0, 0, 1.0}, {2, 2, 1.0}, {1, 0, 0.5}};
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
  // Column 1 is empty; the labeler names the offending unknown.
  CHECK_THROWS_WITH_AS(
      solve_sparse(a, b, {}, [](int i) { return "block lambda entry " + std::to_string(i); }),
      "empty matrix column at block lambda entry 1", NumericalError);

  Eigen::SparseMatrix<double> bad(2, 3);
  CHECK_THROWS_AS(solve_sparse(bad, b), ValidationError);

  SolveOptions opts;
  opts.method = "cholesky";
  CHECK_THROWS_AS(solve_sparse(laplacian_1d(3), b, opts), ValidationError);
}

TEST_CASE("singular systems fail with a diagnostic") {
  // Row 1 duplicates row 0: structurally full but rank deficient.
  Eigen::SparseMatrix<double> a(2, 2);
  std::vector<Eigen::Triplet<double>> trips = {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}, {1, 1, 2.0}};
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd b(2);
  b << 1.0, 0.0;
  CHECK_THROWS_AS(solve_sparse(a, b), NumericalError);
}

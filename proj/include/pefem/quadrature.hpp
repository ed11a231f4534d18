#pragma once

#include <vector>

#include "pefem/geometry.hpp"

namespace pefem {

// Quadrature point on the reference triangle {(x,y) : x,y >= 0, x+y <= 1}.
// Weights include the reference measure, i.e. they sum to 1/2.
struct TrianglePoint {
  double x, y, w;
};

struct TriangleRule {
  int degree = 0;  // total polynomial degree integrated exactly
  std::vector<TrianglePoint> points;
};

// Rule exact for all polynomials of total degree <= `degree`, degree in
// 1..10. All weights are positive; every returned rule is invariant under
// the symmetry group of the triangle and is verified at construction
// against closed-form monomial integrals.
const TriangleRule& triangle_quadrature(int degree);

// Gauss-Legendre point on [0, 1]; weights sum to 1.
struct GaussPoint {
  double t, w;
};

// n-point Gauss-Legendre rule on [0,1], exact for degree <= 2n-1, n in 1..10.
const std::vector<GaussPoint>& edge_gauss(int npoints);

// Closed-form \int_T x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double triangle_monomial_integral(int a, int b);

}  // namespace pefem

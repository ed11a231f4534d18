#include "pefem/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "pefem/errors.hpp"

namespace pefem {

double triangle_monomial_integral(int a, int b) {
  // a! b! / (a+b+2)! evaluated without large factorials.
  double v = 1.0;
  for (int i = 1; i <= b; ++i) v *= static_cast<double>(i) / (a + i);
  for (int i = a + b + 1; i <= a + b + 2; ++i) v /= i;
  return v;
}

namespace {

// Nodes of the n-point Gauss-Legendre rule on [-1,1] by Newton iteration on
// the three-term recurrence; standard symmetric-half construction.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void verify_triangle_rule(const TriangleRule& rule) {
  for (int a = 0; a + 0 <= rule.degree; ++a) {
    for (int b = 0; a + b <= rule.degree; ++b) {
      double q = 0.0;
      for (const auto& p : rule.points) q += p.w * std::pow(p.x, a) * std::pow(p.y, b);
      double exact = triangle_monomial_integral(a, b);
      if (std::abs(q - exact) > 1e-14 * (1.0 + std::abs(exact)))
        throw NumericalError("triangle quadrature failed monomial verification");
    }
  }
  for (const auto& p : rule.points)
    if (!(p.w > 0.0)) throw NumericalError("triangle quadrature has non-positive weight");
}

// Append a symmetry orbit given barycentric coordinates (l0,l1,l2) and the
// total weight of the orbit (distributed equally over its members).
void add_orbit(TriangleRule& rule, double l0, double l1, double l2, double orbit_weight) {
  std::array<std::array<double, 3>, 6> perms = {{{l0, l1, l2},
                                                 {l1, l2, l0},
                                                 {l2, l0, l1},
                                                 {l0, l2, l1},
                                                 {l2, l1, l0},
                                                 {l1, l0, l2}}};
  // Deduplicate coinciding permutations (centroid / edge-symmetric points).
  std::vector<std::array<double, 3>> unique;
  for (const auto& p : perms) {
    bool seen = false;
    for (const auto& q : unique)
      if (std::abs(p[0] - q[0]) < 1e-13 && std::abs(p[1] - q[1]) < 1e-13) seen = true;
    if (!seen) unique.push_back(p);
  }
  for (const auto& p : unique)
    rule.points.push_back({p[1], p[2], orbit_weight / unique.size()});
}

// Classic minimal symmetric rules (weights in barycentric-orbit form; total
// weight of each orbit given relative to triangle area 1/2).
TriangleRule classic_rule(int degree) {
  TriangleRule rule;
  rule.degree = degree;
  const double A = 0.5;
  switch (degree) {
    case 1:
      add_orbit(rule, 1.0 / 3, 1.0 / 3, 1.0 / 3, A);
      break;
    case 2:
      add_orbit(rule, 2.0 / 3, 1.0 / 6, 1.0 / 6, A);
      break;
    case 3:
    case 4: {
      // 6-point degree-4 rule, both orbits positive.
      double a1 = 0.445948490915965, w1 = 0.223381589678011;
      double a2 = 0.091576213509771, w2 = 0.109951743655322;
      add_orbit(rule, 1 - 2 * a1, a1, a1, 3 * w1 * A);
      add_orbit(rule, 1 - 2 * a2, a2, a2, 3 * w2 * A);
      rule.degree = 4;
      break;
    }
    case 5: {
      double a1 = 0.470142064105115, w1 = 0.132394152788506;
      double a2 = 0.101286507323456, w2 = 0.125939180544827;
      add_orbit(rule, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225 * A);
      add_orbit(rule, 1 - 2 * a1, a1, a1, 3 * w1 * A);
      add_orbit(rule, 1 - 2 * a2, a2, a2, 3 * w2 * A);
      break;
    }
    default:
      throw ValidationError("classic_rule: unsupported degree");
  }
  return rule;
}

// Conical-product rule (Duffy substitution x = v, y = u(1-v)) symmetrized
// over the six affine symmetries of the triangle. Exactness: the product
// rule integrates u^b * v^a (1-v)^{b+1} exactly when the Gauss orders cover
// degree d in u and d+1 in v; averaging over symmetries preserves exactness.
TriangleRule conical_rule(int degree) {
  int nu = (degree + 2) / 2;      // ceil((d+1)/2)
  int nv = (degree + 3) / 2;      // ceil((d+2)/2)
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);
  TriangleRule base;
  base.degree = degree;
  for (int i = 0; i < nv; ++i) {
    double v = 0.5 * (xv[i] + 1.0), dv = 0.5 * wv[i];
    for (int j = 0; j < nu; ++j) {
      double u = 0.5 * (xu[j] + 1.0), du = 0.5 * wu[j];
      base.points.push_back({v, u * (1.0 - v), dv * du * (1.0 - v)});
    }
  }
  TriangleRule rule;
  rule.degree = degree;
  for (const auto& p : base.points) {
    double l0 = 1.0 - p.x - p.y;
    add_orbit(rule, l0, p.x, p.y, p.w);
  }
  return rule;
}

}  // namespace

const TriangleRule& triangle_quadrature(int degree) {
  if (degree < 1 || degree > 10)
    throw ValidationError("triangle_quadrature: degree must be in 1..10");
  static std::map<int, TriangleRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  TriangleRule rule = degree <= 5 ? classic_rule(degree) : conical_rule(degree);
  verify_triangle_rule(rule);
  return cache.emplace(degree, std::move(rule)).first->second;
}

const std::vector<GaussPoint>& edge_gauss(int npoints) {
  if (npoints < 1 || npoints > 10)
    throw ValidationError("edge_gauss: npoints must be in 1..10");
  static std::map<int, std::vector<GaussPoint>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(npoints);
  if (it != cache.end()) return it->second;
  std::vector<double> x, w;
  gauss_legendre(npoints, x, w);
  std::vector<GaussPoint> pts(npoints);
  for (int i = 0; i < npoints; ++i) pts[i] = {0.5 * (x[i] + 1.0), 0.5 * w[i]};
  return cache.emplace(npoints, std::move(pts)).first->second;
}

}  // namespace pefem

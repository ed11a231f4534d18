#include "pefem/fe_space.hpp"

#include <cmath>
#include <mutex>

#include "pefem/errors.hpp"
#include "pefem/quadrature.hpp"

namespace pefem {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

// x^a y^b differentiated (ax, ay) times, evaluated at p.
double monomial_deriv(int a, int b, int ax, int ay, Vec2 p) {
  if (ax > a || ay > b) return 0.0;
  double c = 1.0;
  for (int i = 0; i < ax; ++i) c *= a - i;
  for (int i = 0; i < ay; ++i) c *= b - i;
  return c * std::pow(p.x, a - ax) * std::pow(p.y, b - ay);
}

ReferenceElement build_reference(int order) {
  if (order < 1 || order > 6) throw ValidationError("element order must be in 1..6");
  ReferenceElement re;
  re.order = order;
  re.ndof = (order + 1) * (order + 2) / 2;
  re.powers = monomial_powers(order);

  const double k = order;
  const Vec2 verts[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  re.nodes.assign(verts, verts + 3);
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = verts[e], b = verts[(e + 1) % 3];
    for (int j = 1; j < order; ++j) re.nodes.push_back(a + (b - a) * (j / k));
  }
  for (int d = 2; d <= order - 1; ++d) {  // graded interior lattice
    for (int j = 1; j < d; ++j) {
      const int i = d - j;
      re.nodes.push_back({i / k, j / k});
    }
  }
  if (static_cast<int>(re.nodes.size()) != re.ndof) {
    throw NumericalError("reference node count mismatch");
  }

  Eigen::MatrixXd v(re.ndof, re.ndof);
  for (int i = 0; i < re.ndof; ++i) {
    for (int j = 0; j < re.ndof; ++j) {
      const auto [a, b] = re.powers[j];
      v(i, j) = std::pow(re.nodes[i].x, a) * std::pow(re.nodes[i].y, b);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  re.coeff = lu.inverse();
  const double resid = (v * re.coeff - Eigen::MatrixXd::Identity(re.ndof, re.ndof))
                           .cwiseAbs()
                           .maxCoeff();
  if (resid > 1e-9) throw NumericalError("reference basis construction is ill conditioned");
  return re;
}

}  // namespace

std::vector<std::pair<int, int>> monomial_powers(int order) {
  std::vector<std::pair<int, int>> p;
  for (int d = 0; d <= order; ++d) {
    for (int b = 0; b <= d; ++b) p.emplace_back(d - b, b);
  }
  return p;
}

double ReferenceElement::shape(int i, Vec2 p) const {
  double s = 0.0;
  for (int j = 0; j < ndof; ++j) {
    const auto [a, b] = powers[j];
    s += coeff(j, i) * std::pow(p.x, a) * std::pow(p.y, b);
  }
  return s;
}

double ReferenceElement::shape_deriv(int i, int ax, int ay, Vec2 p) const {
  double s = 0.0;
  for (int j = 0; j < ndof; ++j) {
    const auto [a, b] = powers[j];
    s += coeff(j, i) * monomial_deriv(a, b, ax, ay, p);
  }
  return s;
}

const ReferenceElement& reference_element(int order) {
  static std::mutex mu;
  static std::map<int, ReferenceElement> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_reference(order)).first;
  return it->second;
}

ElementMap element_map(const Mesh2D& m, int tri) {
  const auto& t = m.triangles[tri];
  ElementMap em;
  em.origin = m.vertices[t[0]];
  const Vec2 e1 = m.vertices[t[1]] - em.origin;
  const Vec2 e2 = m.vertices[t[2]] - em.origin;
  em.b[0][0] = e1.x;
  em.b[0][1] = e2.x;
  em.b[1][0] = e1.y;
  em.b[1][1] = e2.y;
  em.det = e1.x * e2.y - e1.y * e2.x;
  if (em.det <= 0.0) throw NumericalError("element map is degenerate or flipped");
  em.binv[0][0] = e2.y / em.det;
  em.binv[0][1] = -e2.x / em.det;
  em.binv[1][0] = -e1.y / em.det;
  em.binv[1][1] = e1.x / em.det;
  return em;
}

Vec2 to_physical(const ElementMap& em, Vec2 r) {
  return {em.origin.x + em.b[0][0] * r.x + em.b[0][1] * r.y,
          em.origin.y + em.b[1][0] * r.x + em.b[1][1] * r.y};
}

Vec2 to_reference(const ElementMap& em, Vec2 x) {
  const Vec2 d = x - em.origin;
  return {em.binv[0][0] * d.x + em.binv[0][1] * d.y,
          em.binv[1][0] * d.x + em.binv[1][1] * d.y};
}

FeSpace::FeSpace(const Mesh2D& mesh, int order) : mesh_(&mesh), order_(order) {
  const ReferenceElement& re = reference_element(order);
  const int nv = static_cast<int>(mesh.vertices.size());
  const int nt = static_cast<int>(mesh.triangles.size());
  const int per_edge = order - 1;
  const int per_cell = (order - 1) * (order - 2) / 2;

  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (!edge_first_dof_.count(key)) edge_first_dof_[key] = 0;
    }
  }
  int next = nv;
  for (auto& [key, first] : edge_first_dof_) {
    first = next;
    next += per_edge;
  }
  const int interior_base = next;
  n_dofs_ = interior_base + nt * per_cell;

  dof_coords_.resize(n_dofs_);
  for (int i = 0; i < nv; ++i) dof_coords_[i] = mesh.vertices[i];
  for (const auto& [key, first] : edge_first_dof_) {
    const Vec2 a = mesh.vertices[key.first], b = mesh.vertices[key.second];
    for (int j = 1; j < order; ++j) dof_coords_[first + j - 1] = a + (b - a) * (j / double(order));
  }

  maps_.reserve(nt);
  cell_dofs_.assign(nt, {});
  for (int t = 0; t < nt; ++t) {
    maps_.push_back(element_map(mesh, t));
    auto& dofs = cell_dofs_[t];
    dofs.resize(re.ndof);
    const auto& tri = mesh.triangles[t];
    for (int v = 0; v < 3; ++v) dofs[v] = tri[v];
    int local = 3;
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      const int first = edge_first_dof_.at({std::min(a, b), std::max(a, b)});
      for (int j = 1; j < order; ++j, ++local) {
        // Stored orientation runs low to high vertex id.
        dofs[local] = a < b ? first + j - 1 : first + order - 1 - j;
      }
    }
    for (int j = 0; j < per_cell; ++j, ++local) {
      const int dof = interior_base + t * per_cell + j;
      dofs[local] = dof;
      dof_coords_[dof] = to_physical(maps_[t], re.nodes[3 + 3 * per_edge + j]);
    }
  }
}

std::vector<int> FeSpace::edge_interior_dofs(int va, int vb) const {
  const auto it = edge_first_dof_.find({std::min(va, vb), std::max(va, vb)});
  if (it == edge_first_dof_.end()) throw ValidationError("no such mesh edge");
  std::vector<int> dofs(order_ - 1);
  for (int j = 0; j < order_ - 1; ++j) {
    dofs[j] = va < vb ? it->second + j : it->second + order_ - 2 - j;
  }
  return dofs;
}

Eigen::VectorXd FeSpace::basis_values(int tri, Vec2 x) const {
  const ReferenceElement& re = reference_element(order_);
  const Vec2 r = to_reference(maps_[tri], x);
  Eigen::VectorXd v(re.ndof);
  for (int i = 0; i < re.ndof; ++i) v[i] = re.shape(i, r);
  return v;
}

Eigen::VectorXd FeSpace::basis_derivative(int tri, int ax, int ay, Vec2 x) const {
  const ReferenceElement& re = reference_element(order_);
  const ElementMap& em = maps_[tri];
  const Vec2 r = to_reference(em, x);
  // d/dx_i = sum_j binv[j][i] d/dr_j expanded binomially to mixed order.
  Eigen::VectorXd out = Eigen::VectorXd::Zero(re.ndof);
  for (int i = 0; i <= ax; ++i) {
    for (int l = 0; l <= ay; ++l) {
      const double c = binom(ax, i) * binom(ay, l) * std::pow(em.binv[0][0], i) *
                       std::pow(em.binv[1][0], ax - i) * std::pow(em.binv[0][1], l) *
                       std::pow(em.binv[1][1], ay - l);
      if (c == 0.0) continue;
      const int dr = i + l, ds = (ax - i) + (ay - l);
      for (int n = 0; n < re.ndof; ++n) out[n] += c * re.shape_deriv(n, dr, ds, r);
    }
  }
  return out;
}

double FeSpace::value(const Eigen::VectorXd& u, int tri, Vec2 x) const {
  const Eigen::VectorXd v = basis_values(tri, x);
  const auto& dofs = cell_dofs_[tri];
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += v[i] * u[dofs[i]];
  return s;
}

Vec2 FeSpace::gradient(const Eigen::VectorXd& u, int tri, Vec2 x) const {
  return {derivative(u, tri, 1, 0, x), derivative(u, tri, 0, 1, x)};
}

double FeSpace::derivative(const Eigen::VectorXd& u, int tri, int ax, int ay, Vec2 x) const {
  const Eigen::VectorXd v = basis_derivative(tri, ax, ay, x);
  const auto& dofs = cell_dofs_[tri];
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += v[i] * u[dofs[i]];
  return s;
}

TraceSpace::TraceSpace(const FeSpace& space, BoundaryChain chain)
    : chain_(std::move(chain)), order_(space.order()) {
  const int n = chain_.n_edges();
  n_dofs_ = n * order_;
  edge_dofs_.assign(n, {});
  volume_dofs_.assign(n_dofs_, -1);
  for (int e = 0; e < n; ++e) {
    auto& dofs = edge_dofs_[e];
    dofs.resize(order_ + 1);
    dofs[0] = e;
    for (int j = 1; j < order_; ++j) dofs[j] = n + e * (order_ - 1) + (j - 1);
    dofs[order_] = (e + 1) % n;
    volume_dofs_[e] = chain_.vertex_ids[e];
    const auto interior =
        space.edge_interior_dofs(chain_.vertex_ids[e], chain_.vertex_ids[(e + 1) % n]);
    for (int j = 1; j < order_; ++j) volume_dofs_[dofs[j]] = interior[j - 1];
  }
}

void TraceSpace::eval_1d(int order, double s, double* vals) {
  for (int j = 0; j <= order; ++j) {
    double v = 1.0;
    for (int m = 0; m <= order; ++m) {
      if (m == j) continue;
      v *= (s * order - m) / (j - m);
    }
    vals[j] = v;
  }
}

double TraceSpace::value(const Eigen::VectorXd& w, int edge, double s) const {
  double vals[8];
  eval_1d(order_, s, vals);
  const auto& dofs = edge_dofs_[edge];
  double out = 0.0;
  for (int j = 0; j <= order_; ++j) out += vals[j] * w[dofs[j]];
  return out;
}

Eigen::SparseMatrix<double> trace_mass_matrix(const TraceSpace& w) {
  const int k = w.order();
  const auto& gauss = edge_gauss(k + 2);
  std::vector<Eigen::Triplet<double>> trips;
  double vals[8];
  for (int e = 0; e < w.chain().n_edges(); ++e) {
    const auto& dofs = w.edge_dofs(e);
    const double len = w.chain().edge_len[e];
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (const auto& gp : gauss) {
      TraceSpace::eval_1d(k, gp.t, vals);
      for (int i = 0; i <= k; ++i) {
        for (int j = 0; j <= k; ++j) local(i, j) += gp.w * len * vals[i] * vals[j];
      }
    }
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; j <= k; ++j) trips.emplace_back(dofs[i], dofs[j], local(i, j));
    }
  }
  Eigen::SparseMatrix<double> m(w.n_dofs(), w.n_dofs());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::VectorXd trace_l2_projection(const TraceSpace& w,
                                    const std::function<double(int, double, Vec2)>& f) {
  const int k = w.order();
  const auto& gauss = edge_gauss(k + 2);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(w.n_dofs());
  double vals[8];
  for (int e = 0; e < w.chain().n_edges(); ++e) {
    const auto& dofs = w.edge_dofs(e);
    const double len = w.chain().edge_len[e];
    for (const auto& gp : gauss) {
      const Vec2 p = w.chain().p0[e] + (w.chain().p1[e] - w.chain().p0[e]) * gp.t;
      const double fv = f(e, gp.t, p);
      TraceSpace::eval_1d(k, gp.t, vals);
      for (int i = 0; i <= k; ++i) rhs[dofs[i]] += gp.w * len * vals[i] * fv;
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(trace_mass_matrix(w));
  if (solver.info() != Eigen::Success) throw NumericalError("trace mass factorization failed");
  return solver.solve(rhs);
}

}  // namespace pefem

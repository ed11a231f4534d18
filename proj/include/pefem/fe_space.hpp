#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pefem/interface_map.hpp"
#include "pefem/mesh.hpp"

namespace pefem {

// Graded lexicographic position of the monomial x^a y^b.
inline int monomial_index(int a, int b) {
  const int d = a + b;
  return d * (d + 1) / 2 + b;
}

// All (a, b) with a + b <= order, in graded lexicographic order.
std::vector<std::pair<int, int>> monomial_powers(int order);

// Lagrange basis on the reference triangle {x, y >= 0, x + y <= 1} with
// equispaced nodes, stored as monomial coefficients. Node order: the three
// vertices, then per-edge interior nodes (edges v0v1, v1v2, v2v0, each walked
// from its first vertex), then interior lattice nodes.
struct ReferenceElement {
  int order = 0;
  int ndof = 0;
  std::vector<Vec2> nodes;
  std::vector<std::pair<int, int>> powers;
  Eigen::MatrixXd coeff;  // column i holds the monomial coefficients of basis i

  double shape(int i, Vec2 p) const;
  // d^(ax+ay) basis_i / dx^ax dy^ay at p.
  double shape_deriv(int i, int ax, int ay, Vec2 p) const;
};

// Cached; valid orders are 1..6.
const ReferenceElement& reference_element(int order);

// Affine map x = origin + B * r from the reference triangle to element tri.
struct ElementMap {
  Vec2 origin;
  double b[2][2];
  double binv[2][2];
  double det = 0.0;  // positive for CCW triangles
};

ElementMap element_map(const Mesh2D& m, int tri);
Vec2 to_physical(const ElementMap& em, Vec2 r);
Vec2 to_reference(const ElementMap& em, Vec2 x);

// Continuous piecewise-polynomial space on a triangle mesh. Global numbering:
// one dof per mesh vertex (id = vertex id), then order-1 dofs per undirected
// edge walked from its lower to higher vertex id, then interior dofs per
// element. The mesh must outlive the space.
class FeSpace {
 public:
  FeSpace(const Mesh2D& mesh, int order);

  const Mesh2D& mesh() const { return *mesh_; }
  int order() const { return order_; }
  int n_dofs() const { return n_dofs_; }
  int n_edges() const { return static_cast<int>(edge_first_dof_.size()); }
  const std::vector<int>& cell_dofs(int tri) const { return cell_dofs_[tri]; }
  Vec2 dof_coord(int dof) const { return dof_coords_[dof]; }

  // Interior dofs of edge (va, vb) ordered from va to vb; empty for order 1.
  std::vector<int> edge_interior_dofs(int va, int vb) const;

  // Basis values of element tri at a physical point; the element polynomial
  // is continued analytically, so x may lie outside the element.
  Eigen::VectorXd basis_values(int tri, Vec2 x) const;
  Eigen::VectorXd basis_derivative(int tri, int ax, int ay, Vec2 x) const;

  double value(const Eigen::VectorXd& u, int tri, Vec2 x) const;
  Vec2 gradient(const Eigen::VectorXd& u, int tri, Vec2 x) const;
  double derivative(const Eigen::VectorXd& u, int tri, int ax, int ay, Vec2 x) const;

  const ElementMap& map_of(int tri) const { return maps_[tri]; }

 private:
  const Mesh2D* mesh_;
  int order_;
  int n_dofs_ = 0;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<Vec2> dof_coords_;
  std::vector<ElementMap> maps_;
  std::map<std::pair<int, int>, int> edge_first_dof_;  // key: (min, max) vertex
};

// Continuous piecewise-polynomial space on one boundary chain polygon.
// Numbering: one dof per chain vertex (id = chain position), then order-1
// interior dofs per chain edge. edge_dofs(e) lists the order+1 dofs of edge e
// at parameters s = j/order, j = 0..order.
class TraceSpace {
 public:
  TraceSpace(const FeSpace& space, BoundaryChain chain);

  int order() const { return order_; }
  int n_dofs() const { return n_dofs_; }
  const BoundaryChain& chain() const { return chain_; }
  const std::vector<int>& edge_dofs(int e) const { return edge_dofs_[e]; }
  // Matching volume dof of each trace dof; nodal lifting scatters through it.
  const std::vector<int>& volume_dofs() const { return volume_dofs_; }

  // 1D Lagrange basis on [0,1] with nodes j/order; writes order+1 values.
  static void eval_1d(int order, double s, double* vals);

  double value(const Eigen::VectorXd& w, int edge, double s) const;

 private:
  BoundaryChain chain_;
  int order_;
  int n_dofs_;
  std::vector<std::vector<int>> edge_dofs_;
  std::vector<int> volume_dofs_;
};

Eigen::SparseMatrix<double> trace_mass_matrix(const TraceSpace& w);

// L2-orthogonal projection onto the trace space; f receives (edge, s, point).
Eigen::VectorXd trace_l2_projection(const TraceSpace& w,
                                    const std::function<double(int, double, Vec2)>& f);

}  // namespace pefem

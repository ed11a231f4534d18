#include "pefem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pefem/errors.hpp"
#include "pefem/extension.hpp"
#include "pefem/quadrature.hpp"

namespace pefem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using RowMajorSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

int edge_points_for(int order, int requested) { return requested > 0 ? requested : order + 2; }

Vec2 chain_point(const BoundaryChain& c, int e, double s) {
  return c.p0[e] + (c.p1[e] - c.p0[e]) * s;
}

Eigen::SparseMatrix<double> from_triplets(int rows, int cols, const Triplets& trips) {
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

// Appends scale * m[row,:] into the global triplet buffer at (row_out, col_offset).
void append_row(Triplets& out, const RowMajorSparse& m, int row, int row_out, int col_offset,
                double scale) {
  for (RowMajorSparse::InnerIterator it(m, row); it; ++it) {
    out.emplace_back(row_out, col_offset + static_cast<int>(it.col()), scale * it.value());
  }
}

std::unordered_set<int> chain_dof_set(const TraceSpace& w) {
  return {w.volume_dofs().begin(), w.volume_dofs().end()};
}

}  // namespace

Eigen::SparseMatrix<double> assemble_stiffness(const FeSpace& space, double p) {
  const int k = space.order();
  const ReferenceElement& re = reference_element(k);
  const TriangleRule& rule = triangle_quadrature(std::max(1, 2 * k - 2));
  const int nq = static_cast<int>(rule.points.size());

  // Reference gradient table: [q][i] -> (d_xi, d_eta).
  std::vector<std::vector<Vec2>> ref_grad(nq, std::vector<Vec2>(re.ndof));
  for (int q = 0; q < nq; ++q) {
    const Vec2 rp{rule.points[q].x, rule.points[q].y};
    for (int i = 0; i < re.ndof; ++i) {
      ref_grad[q][i] = {re.shape_deriv(i, 1, 0, rp), re.shape_deriv(i, 0, 1, rp)};
    }
  }

  Triplets trips;
  std::vector<Vec2> phys(re.ndof);
  for (int t = 0; t < static_cast<int>(space.mesh().triangles.size()); ++t) {
    const ElementMap& em = space.map_of(t);
    const auto& dofs = space.cell_dofs(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(re.ndof, re.ndof);
    for (int q = 0; q < nq; ++q) {
      for (int i = 0; i < re.ndof; ++i) {
        const Vec2 g = ref_grad[q][i];
        phys[i] = {em.binv[0][0] * g.x + em.binv[1][0] * g.y,
                   em.binv[0][1] * g.x + em.binv[1][1] * g.y};
      }
      const double wq = p * rule.points[q].w * em.det;
      for (int i = 0; i < re.ndof; ++i) {
        for (int j = 0; j < re.ndof; ++j) local(i, j) += wq * dot(phys[i], phys[j]);
      }
    }
    for (int i = 0; i < re.ndof; ++i) {
      for (int j = 0; j < re.ndof; ++j) trips.emplace_back(dofs[i], dofs[j], local(i, j));
    }
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trips);
}

Eigen::VectorXd assemble_load(const FeSpace& space, const std::function<double(Vec2)>& f) {
  const int k = space.order();
  const ReferenceElement& re = reference_element(k);
  const TriangleRule& rule = triangle_quadrature(std::min(10, 2 * k + 2));
  const int nq = static_cast<int>(rule.points.size());
  std::vector<std::vector<double>> shape(nq, std::vector<double>(re.ndof));
  for (int q = 0; q < nq; ++q) {
    for (int i = 0; i < re.ndof; ++i) {
      shape[q][i] = re.shape(i, {rule.points[q].x, rule.points[q].y});
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs());
  for (int t = 0; t < static_cast<int>(space.mesh().triangles.size()); ++t) {
    const ElementMap& em = space.map_of(t);
    const auto& dofs = space.cell_dofs(t);
    for (int q = 0; q < nq; ++q) {
      const Vec2 x = to_physical(em, {rule.points[q].x, rule.points[q].y});
      const double wq = rule.points[q].w * em.det * f(x);
      for (int i = 0; i < re.ndof; ++i) rhs[dofs[i]] += wq * shape[q][i];
    }
  }
  return rhs;
}

Eigen::SparseMatrix<double> assemble_taylor_boundary(const FeSpace& space, const TraceSpace& w,
                                                     int gauss_points) {
  const int k = space.order();
  const auto& gauss = edge_gauss(edge_points_for(k, gauss_points));
  const BoundaryChain& chain = w.chain();
  Triplets trips;
  double test_vals[8];
  for (int e = 0; e < chain.n_edges(); ++e) {
    const int tri = chain.tri[e];
    const auto& rows = w.edge_dofs(e);
    const auto& cols = space.cell_dofs(tri);
    const double len = chain.edge_len[e];
    for (const auto& gp : gauss) {
      const Vec2 xi = chain_point(chain, e, gp.t);
      const Eigen::VectorXd trial = space.basis_values(tri, eta(chain, xi));
      TraceSpace::eval_1d(k, gp.t, test_vals);
      for (int i = 0; i <= k; ++i) {
        const int row = w.volume_dofs()[rows[i]];
        const double tw = gp.w * len * test_vals[i];
        for (int m = 0; m < trial.size(); ++m) trips.emplace_back(row, cols[m], tw * trial[m]);
      }
    }
  }
  return from_triplets(space.n_dofs(), space.n_dofs(), trips);
}

Eigen::SparseMatrix<double> assemble_trace_pairing_volume(const FeSpace& space,
                                                          const TraceSpace& w) {
  const Eigen::SparseMatrix<double> mass = trace_mass_matrix(w);
  Triplets trips;
  for (int j = 0; j < mass.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(mass, j); it; ++it) {
      trips.emplace_back(w.volume_dofs()[it.row()], static_cast<int>(it.col()), it.value());
    }
  }
  return from_triplets(space.n_dofs(), w.n_dofs(), trips);
}

namespace {

// Shared pullback-pairing kernel; row_of maps a test trace dof to its output
// row. The pulled-back trial trace has derivative kinks where center rays
// through trial-chain vertices cross the test edge, so each edge is
// integrated panel-by-panel between those breakpoints.
Triplets cross_pairing_triplets(const TraceSpace& test_w, const TraceSpace& trial_w,
                                int gauss_points, const std::function<int(int)>& row_of) {
  const int kt = test_w.order();
  const int ku = trial_w.order();
  const auto& gauss = edge_gauss(edge_points_for(std::max(kt, ku), gauss_points));
  const BoundaryChain& chain = test_w.chain();
  Triplets trips;
  double test_vals[8], trial_vals[8];
  for (int e = 0; e < chain.n_edges(); ++e) {
    const auto& rows = test_w.edge_dofs(e);
    const double len = chain.edge_len[e];
    std::vector<double> panel = pullback_breakpoints(chain, e, trial_w.chain());
    panel.insert(panel.begin(), 0.0);
    panel.push_back(1.0);
    for (std::size_t p = 0; p + 1 < panel.size(); ++p) {
      const double width = panel[p + 1] - panel[p];
      for (const auto& gp : gauss) {
        const double t = panel[p] + width * gp.t;
        const ChainPoint img = cross_map(chain, trial_w.chain(), chain_point(chain, e, t));
        const auto& cols = trial_w.edge_dofs(img.edge);
        TraceSpace::eval_1d(kt, t, test_vals);
        TraceSpace::eval_1d(ku, img.s, trial_vals);
        for (int i = 0; i <= kt; ++i) {
          const double tw = gp.w * width * len * test_vals[i];
          for (int m = 0; m <= ku; ++m)
            trips.emplace_back(row_of(rows[i]), cols[m], tw * trial_vals[m]);
        }
      }
    }
  }
  return trips;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_cross_pairing_volume(const FeSpace& space,
                                                          const TraceSpace& test_w,
                                                          const TraceSpace& trial_w,
                                                          int gauss_points) {
  const auto trips = cross_pairing_triplets(test_w, trial_w, gauss_points,
                                            [&](int j) { return test_w.volume_dofs()[j]; });
  return from_triplets(space.n_dofs(), trial_w.n_dofs(), trips);
}

Eigen::SparseMatrix<double> assemble_cross_pairing(const TraceSpace& test_w,
                                                   const TraceSpace& trial_w, int gauss_points) {
  const auto trips =
      cross_pairing_triplets(test_w, trial_w, gauss_points, [](int j) { return j; });
  return from_triplets(test_w.n_dofs(), trial_w.n_dofs(), trips);
}

Eigen::SparseMatrix<double> assemble_tau(const FeSpace& space, const TraceSpace& w, double p,
                                         int gauss_points) {
  const int k = space.order();
  const auto& gauss = edge_gauss(edge_points_for(k, gauss_points));
  const BoundaryChain& chain = w.chain();
  Triplets trips;
  double test_vals[8];
  for (int e = 0; e < chain.n_edges(); ++e) {
    const int tri = chain.tri[e];
    const auto& rows = w.edge_dofs(e);
    const auto& cols = space.cell_dofs(tri);
    const double len = chain.edge_len[e];
    const Vec2 nh = chain.outward[e];
    for (const auto& gp : gauss) {
      const Vec2 xi = chain_point(chain, e, gp.t);
      const Vec2 mapped = eta(chain, xi);
      const Vec2 n = (mapped - chain.circle.center) * (chain.normal_sign / chain.circle.radius);
      const Eigen::VectorXd gx_m = space.basis_derivative(tri, 1, 0, mapped);
      const Eigen::VectorXd gy_m = space.basis_derivative(tri, 0, 1, mapped);
      const Eigen::VectorXd gx_d = space.basis_derivative(tri, 1, 0, xi);
      const Eigen::VectorXd gy_d = space.basis_derivative(tri, 0, 1, xi);
      TraceSpace::eval_1d(k, gp.t, test_vals);
      for (int m = 0; m < gx_m.size(); ++m) {
        const double mismatch =
            p * (gx_m[m] * n.x + gy_m[m] * n.y) - p * (gx_d[m] * nh.x + gy_d[m] * nh.y);
        for (int i = 0; i <= k; ++i) {
          trips.emplace_back(rows[i], cols[m], gp.w * len * test_vals[i] * mismatch);
        }
      }
    }
  }
  return from_triplets(w.n_dofs(), space.n_dofs(), trips);
}

Eigen::VectorXd assemble_boundary_data_rhs(const FeSpace& space, const TraceSpace& w,
                                           const std::function<double(Vec2)>& g,
                                           int gauss_points) {
  const int k = space.order();
  const auto& gauss = edge_gauss(edge_points_for(k, gauss_points));
  const BoundaryChain& chain = w.chain();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs());
  double test_vals[8];
  for (int e = 0; e < chain.n_edges(); ++e) {
    const auto& rows = w.edge_dofs(e);
    const double len = chain.edge_len[e];
    for (const auto& gp : gauss) {
      const double gv = g(eta(chain, chain_point(chain, e, gp.t)));
      TraceSpace::eval_1d(k, gp.t, test_vals);
      for (int i = 0; i <= k; ++i) {
        rhs[w.volume_dofs()[rows[i]]] += gp.w * len * test_vals[i] * gv;
      }
    }
  }
  return rhs;
}

namespace {

double theta_for(const CoupledOptions& opt, double max_p, double h) {
  const double c = opt.c_theta > 0.0 ? opt.c_theta : 10.0 * max_p;
  return c / std::pow(h, opt.theta_exponent);
}

}  // namespace

DirichletSystem assemble_dirichlet_system(const FeSpace& space,
                                          const std::vector<const TraceSpace*>& chains, double p,
                                          const std::function<double(Vec2)>& f,
                                          const std::function<double(Vec2)>& g,
                                          const CoupledOptions& opt) {
  if (chains.empty()) throw ValidationError("dirichlet system needs at least one chain");
  const int n = space.n_dofs();
  double h = chains[0]->chain().edge_len[0];
  for (const auto* w : chains) h = std::min(h, w->chain().edge_len[0]);
  DirichletSystem sys;
  sys.theta = theta_for(opt, p, h);

  const RowMajorSparse a = assemble_stiffness(space, p);
  const Eigen::VectorXd load = assemble_load(space, f);
  std::unordered_set<int> boundary;
  for (const auto* w : chains) {
    const auto s = chain_dof_set(*w);
    boundary.insert(s.begin(), s.end());
  }

  Triplets trips;
  sys.rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (boundary.count(i)) continue;
    append_row(trips, a, i, i, 0, 1.0);
    sys.rhs[i] = load[i];
  }
  for (const auto* w : chains) {
    const RowMajorSparse tay = assemble_taylor_boundary(space, *w, opt.edge_points);
    const Eigen::VectorXd data = assemble_boundary_data_rhs(space, *w, g, opt.edge_points);
    for (const int vd : w->volume_dofs()) {
      append_row(trips, tay, vd, vd, 0, sys.theta);
      sys.rhs[vd] = sys.theta * data[vd];
    }
  }
  sys.matrix = from_triplets(n, n, trips);
  return sys;
}

std::string CoupledSystem::block_name(int index) const {
  if (index < off_u2) return "u1[" + std::to_string(index - off_u1) + "]";
  if (index < off_lambda) return "u2[" + std::to_string(index - off_u2) + "]";
  if (index < off_rho) return "lambda[" + std::to_string(index - off_lambda) + "]";
  return "rho[" + std::to_string(index - off_rho) + "]";
}

CoupledSystem build_coupled_system(const FeSpace& space1, const TraceSpace& w1,
                                   const FeSpace& space2, const TraceSpace& w2,
                                   const TraceSpace& outer2, const InterfaceProblem& prob,
                                   const CoupledOptions& opt) {
  const int n1 = space1.n_dofs(), n2 = space2.n_dofs();
  const int m1 = w1.n_dofs(), m2 = w2.n_dofs();
  CoupledSystem sys;
  sys.off_u1 = 0;
  sys.off_u2 = n1;
  sys.off_lambda = n1 + n2;
  sys.off_rho = n1 + n2 + m1;
  sys.dim = n1 + n2 + m1 + m2;

  const double p1 = prob.side[0].p, p2 = prob.side[1].p;
  const double max_p = std::max(p1, p2);
  sys.theta1 = theta_for(opt, max_p, w1.chain().edge_len[0]);
  sys.theta2 = theta_for(opt, max_p, w2.chain().edge_len[0]);

  const RowMajorSparse a1 = assemble_stiffness(space1, p1);
  const RowMajorSparse a2 = assemble_stiffness(space2, p2);
  const Eigen::VectorXd f1 = assemble_load(space1, prob.side[0].f);
  const Eigen::VectorXd f2 = assemble_load(space2, prob.side[1].f);
  const RowMajorSparse tay1 = assemble_taylor_boundary(space1, w1, opt.edge_points);
  const RowMajorSparse tay2 = assemble_taylor_boundary(space2, w2, opt.edge_points);
  const RowMajorSparse tay_outer = assemble_taylor_boundary(space2, outer2, opt.edge_points);
  const RowMajorSparse lambda_mass1 = assemble_trace_pairing_volume(space1, w1);
  const RowMajorSparse lambda_cross2 =
      assemble_cross_pairing_volume(space2, w2, w1, opt.edge_points);
  const RowMajorSparse rho_cross1 = assemble_cross_pairing(w1, w2, opt.edge_points);
  const RowMajorSparse rho_mass2 = trace_mass_matrix(w2);
  const RowMajorSparse tau1 = assemble_tau(space1, w1, p1, opt.edge_points);
  const RowMajorSparse tau2 = assemble_tau(space2, w2, p2, opt.edge_points);
  if (!prob.outer_data) throw ValidationError("problem lacks outer boundary data");
  const Eigen::VectorXd outer_rhs =
      assemble_boundary_data_rhs(space2, outer2, prob.outer_data, opt.edge_points);

  const auto interface1 = chain_dof_set(w1);
  const auto interface2 = chain_dof_set(w2);
  const auto outer_set = chain_dof_set(outer2);

  Triplets trips;
  sys.rhs = Eigen::VectorXd::Zero(sys.dim);

  // Side-1 volume rows: interior stiffness or interface penalty.
  for (int i = 0; i < n1; ++i) {
    if (interface1.count(i)) {
      append_row(trips, tay1, i, sys.off_u1 + i, sys.off_u1, sys.theta1);
      append_row(trips, lambda_mass1, i, sys.off_u1 + i, sys.off_lambda, -sys.theta1);
    } else {
      append_row(trips, a1, i, sys.off_u1 + i, sys.off_u1, 1.0);
      sys.rhs[sys.off_u1 + i] = f1[i];
    }
  }
  // Side-2 volume rows: interior, interface penalty, or outer-data penalty.
  for (int i = 0; i < n2; ++i) {
    if (interface2.count(i)) {
      append_row(trips, tay2, i, sys.off_u2 + i, sys.off_u2, sys.theta2);
      append_row(trips, lambda_cross2, i, sys.off_u2 + i, sys.off_lambda, -sys.theta2);
    } else if (outer_set.count(i)) {
      append_row(trips, tay_outer, i, sys.off_u2 + i, sys.off_u2, sys.theta2);
      sys.rhs[sys.off_u2 + i] = sys.theta2 * outer_rhs[i];
    } else {
      append_row(trips, a2, i, sys.off_u2 + i, sys.off_u2, 1.0);
      sys.rhs[sys.off_u2 + i] = f2[i];
    }
  }
  // Neumann rows tested with lifted side-1 interface traces.
  for (int j = 0; j < m1; ++j) {
    const int vd = w1.volume_dofs()[j];
    append_row(trips, a1, vd, sys.off_lambda + j, sys.off_u1, 1.0);
    append_row(trips, tau1, j, sys.off_lambda + j, sys.off_u1, 1.0);
    append_row(trips, rho_cross1, j, sys.off_lambda + j, sys.off_rho, 1.0);
    sys.rhs[sys.off_lambda + j] = f1[vd];
  }
  // Neumann rows tested with lifted side-2 interface traces.
  for (int j = 0; j < m2; ++j) {
    const int vd = w2.volume_dofs()[j];
    append_row(trips, a2, vd, sys.off_rho + j, sys.off_u2, 1.0);
    append_row(trips, tau2, j, sys.off_rho + j, sys.off_u2, 1.0);
    append_row(trips, rho_mass2, j, sys.off_rho + j, sys.off_rho, -1.0);
    sys.rhs[sys.off_rho + j] = f2[vd];
  }

  sys.matrix = from_triplets(sys.dim, sys.dim, trips);

  // Structural sanity: every equation and unknown must be touched.
  std::vector<bool> row_hit(sys.dim, false), col_hit(sys.dim, false);
  for (int k = 0; k < sys.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it) {
      if (it.value() != 0.0) {
        row_hit[it.row()] = true;
        col_hit[it.col()] = true;
      }
    }
  }
  for (int i = 0; i < sys.dim; ++i) {
    if (!row_hit[i]) throw NumericalError("empty coupled-system row at " + sys.block_name(i));
    if (!col_hit[i]) throw NumericalError("empty coupled-system column at " + sys.block_name(i));
  }
  return sys;
}

}  // namespace pefem

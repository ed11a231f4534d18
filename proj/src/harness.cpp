#include "pefem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pefem/errors.hpp"
#include "pefem/extension.hpp"
#include "pefem/quadrature.hpp"

namespace pefem {

namespace {

std::string sci10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::string sci4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path.string());
  out << text;
}

// Coordinate of a trace dof on its chain: vertices first, then the interior
// nodes of each edge at parameters j/k.
Vec2 trace_dof_coord(const TraceSpace& w, int dof) {
  const BoundaryChain& c = w.chain();
  const int n = c.n_edges();
  if (dof < n) return c.p0[dof];
  const int k = w.order();
  const int rem = dof - n;
  const int e = rem / (k - 1);
  const int j = rem % (k - 1) + 1;
  return c.p0[e] + (c.p1[e] - c.p0[e]) * (static_cast<double>(j) / k);
}

}  // namespace

std::string Ratio::label() const {
  return std::to_string(side1) + ":" + std::to_string(side2);
}

Ratio parse_ratio(const std::string& text) {
  const size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ValidationError("ratio must look like A:B, got '" + text + "'");
  }
  Ratio r;
  try {
    size_t used = 0;
    r.side1 = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
    r.side2 = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ValidationError("ratio must look like A:B, got '" + text + "'");
  }
  if (r.side1 < 1 || r.side2 < 1 || r.side1 > 8 || r.side2 > 8) {
    throw ValidationError("ratio sides must be in 1..8");
  }
  return r;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ValidationError("expected a comma-separated integer list, got '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError("expected a nonempty integer list");
  return out;
}

CoupledOptions StudyConfig::coupling_options() const {
  CoupledOptions o;
  o.c_theta = c_theta;
  o.theta_exponent = theta_exponent;
  o.edge_points = edge_points;
  return o;
}

SolveOptions StudyConfig::solve_options() const {
  SolveOptions o;
  o.method = solver;
  o.tol = solver_tol;
  return o;
}

void validate_config(const StudyConfig& config) {
  if (config.problem.empty()) throw ValidationError("config: problem name is empty");
  if (config.orders.empty()) throw ValidationError("config: orders list is empty");
  for (const int k : config.orders) {
    if (k < 1 || k > 4) throw ValidationError("config: orders must lie in 1..4");
  }
  if (config.ratios.empty()) throw ValidationError("config: ratios list is empty");
  if (config.base_edges < 8 || config.base_edges % 2 != 0) {
    throw ValidationError("config: base_edges must be even and >= 8");
  }
  if (config.levels < 3) throw ValidationError("config: levels must be >= 3 for rate fitting");
  if (config.levels > 8) throw ValidationError("config: levels must be <= 8");
  if (config.c_theta < 0.0) throw ValidationError("config: c_theta must be >= 0");
  if (config.theta_exponent <= 0.0) throw ValidationError("config: theta_exponent must be > 0");
  if (config.edge_points < 0 || config.edge_points > 12) {
    throw ValidationError("config: edge_points must be in 0..12");
  }
  if (config.solver != "direct" && config.solver != "iterative") {
    throw ValidationError("config: solver must be 'direct' or 'iterative'");
  }
  if (config.solver_tol <= 0.0) throw ValidationError("config: solver_tol must be > 0");
  if (config.out_dir.empty()) throw ValidationError("config: out_dir is empty");
}

StudyConfig config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config JSON parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config JSON must be an object");
  StudyConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "problem") {
        c.problem = value.get<std::string>();
      } else if (key == "orders") {
        c.orders = value.get<std::vector<int>>();
      } else if (key == "ratios") {
        c.ratios.clear();
        for (const auto& r : value) c.ratios.push_back(parse_ratio(r.get<std::string>()));
      } else if (key == "base_edges") {
        c.base_edges = value.get<int>();
      } else if (key == "levels") {
        c.levels = value.get<int>();
      } else if (key == "c_theta") {
        c.c_theta = value.get<double>();
      } else if (key == "theta_exponent") {
        c.theta_exponent = value.get<double>();
      } else if (key == "edge_points") {
        c.edge_points = value.get<int>();
      } else if (key == "solver") {
        c.solver = value.get<std::string>();
      } else if (key == "solver_tol") {
        c.solver_tol = value.get<double>();
      } else if (key == "out_dir") {
        c.out_dir = value.get<std::string>();
      } else {
        throw ValidationError("config JSON has unknown key: " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config JSON has a mistyped value: ") + e.what());
  }
  validate_config(c);
  return c;
}

StudyConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

InterfaceProblem resolve_problem(const std::string& name, int order) {
  if (name == "patch_generic") return polynomial_patch_case(order, "generic");
  if (name == "patch_radial") return polynomial_patch_case(order, "radial");
  if (name == "patch_radial_unit") return polynomial_patch_case(order, "radial_unit");
  return manufactured_case(name);
}

std::unique_ptr<LevelSolution> solve_level(const InterfaceProblem& prob, int order, int n1,
                                           int n2, const CoupledOptions& copt,
                                           const SolveOptions& sopt) {
  auto level = std::make_unique<LevelSolution>();
  level->mesh1 = build_disk_mesh(prob.interface, n1);
  level->mesh2 = build_annulus_mesh(prob.interface, prob.outer_radius, n2);
  level->s1 = std::make_unique<FeSpace>(level->mesh1, order);
  level->s2 = std::make_unique<FeSpace>(level->mesh2, order);
  level->w1 = std::make_unique<TraceSpace>(*level->s1,
                                           extract_chain(level->mesh1, BoundaryTag::Interface));
  level->w2 = std::make_unique<TraceSpace>(*level->s2,
                                           extract_chain(level->mesh2, BoundaryTag::Interface));
  level->outer =
      std::make_unique<TraceSpace>(*level->s2, extract_chain(level->mesh2, BoundaryTag::Outer));
  level->sys = build_coupled_system(*level->s1, *level->w1, *level->s2, *level->w2, *level->outer,
                                    prob, copt);
  const CoupledSystem& sys = level->sys;
  auto [x, report] = solve_sparse(sys.matrix, sys.rhs, sopt,
                                  [&sys](int i) { return sys.block_name(i); });
  level->x = std::move(x);
  level->report = report;
  return level;
}

LevelMetrics measure_level(const LevelSolution& level, const InterfaceProblem& prob) {
  LevelMetrics m;
  m.h = std::max(mesh_size(level.mesh1), mesh_size(level.mesh2));
  m.dofs = level.sys.dim;
  const Eigen::VectorXd u1 = level.u1();
  const Eigen::VectorXd u2 = level.u2();
  m.error = combine_norms(broken_error(*level.s1, u1, prob.side[0].u, prob.side[0].grad_u),
                          broken_error(*level.s2, u2, prob.side[1].u, prob.side[1].grad_u));
  const Eigen::VectorXd projected = trace_l2_projection(
      *level.w1, [&](int e, double, Vec2 p) {
        return taylor_value(*level.s1, level.w1->chain(), e, u1, p);
      });
  m.lambda_identity =
      (level.lambda() - projected).norm() / std::max(projected.norm(), 1e-30);
  m.flux_imbalance = flux_imbalance(*level.s1, *level.w1, u1, prob.side[0].p, *level.s2,
                                    *level.w2, u2, prob.side[1].p);
  return m;
}

std::vector<StudyRecord> run_study(const StudyConfig& config, std::ostream& log) {
  validate_config(config);
  std::filesystem::create_directories(config.out_dir);
  std::vector<StudyRecord> records;
  for (const Ratio& ratio : config.ratios) {
    for (const int order : config.orders) {
      StudyRecord rec;
      rec.problem = config.problem;
      rec.order = order;
      rec.ratio = ratio;
      try {
        const InterfaceProblem prob = resolve_problem(config.problem, order);
        for (int l = 0; l < config.levels; ++l) {
          const int n1 = config.base_edges * ratio.side1 << l;
          const int n2 = config.base_edges * ratio.side2 << l;
          const auto level = solve_level(prob, order, n1, n2, config.coupling_options(),
                                         config.solve_options());
          const LevelMetrics m = measure_level(*level, prob);
          rec.metrics.push_back(m);
          rec.record.h.push_back(m.h);
          rec.record.l2_error.push_back(m.error.l2);
          rec.record.h1_error.push_back(m.error.h1);
          log << config.problem << " k=" << order << " ratio=" << ratio.label() << " level=" << l
              << " h=" << sci4(m.h) << " dofs=" << m.dofs << " L2=" << sci4(m.error.l2)
              << " H1=" << sci4(m.error.h1) << " solve=" << fixed3(level->report.seconds) << "s\n";
        }
        rec.l2_rate = fit_rate(rec.record.h, rec.record.l2_error);
        rec.h1_rate = fit_rate(rec.record.h, rec.record.h1_error);
        const std::filesystem::path csv =
            std::filesystem::path(config.out_dir) /
            (config.problem + "_" + std::to_string(order) + "_" + ratio.label() + ".csv");
        write_text_file(csv, format_convergence_csv(rec.record));
        rec.csv_path = csv.string();
        rec.ok = true;
        log << "  rates: L2 " << (rec.l2_rate.exact ? "exact" : fixed3(rec.l2_rate.least_squares))
            << ", H1 " << (rec.h1_rate.exact ? "exact" : fixed3(rec.h1_rate.least_squares))
            << " -> " << rec.csv_path << "\n";
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.message = e.what();
        log << config.problem << " k=" << order << " ratio=" << ratio.label()
            << " failed: " << rec.message << "\n";
      }
      records.push_back(std::move(rec));
    }
  }
  write_text_file(std::filesystem::path(config.out_dir) / "summary.txt",
                  format_summary(config, records));
  return records;
}

std::string format_summary(const StudyConfig& config, const std::vector<StudyRecord>& records) {
  constexpr size_t kCol = 12;
  std::ostringstream out;
  out << "coupled interface convergence study\n";
  out << "problem: " << config.problem << "\n";
  out << "base interface edges: " << config.base_edges << ", levels: " << config.levels << "\n";
  out << "theta: C=" << (config.c_theta > 0.0 ? sci4(config.c_theta) : std::string("auto"))
      << ", exponent=" << fixed3(config.theta_exponent) << ", solver: " << config.solver
      << "\n\n";

  for (const Ratio& ratio : config.ratios) {
    out << "ratio " << ratio.label() << "\n";
    std::vector<const StudyRecord*> row;
    for (const int order : config.orders) {
      const auto it = std::find_if(records.begin(), records.end(), [&](const StudyRecord& r) {
        return r.order == order && r.ratio.side1 == ratio.side1 && r.ratio.side2 == ratio.side2;
      });
      row.push_back(it == records.end() ? nullptr : &*it);
    }
    const auto ok_it = std::find_if(row.begin(), row.end(),
                                    [](const StudyRecord* r) { return r && r->ok; });
    if (ok_it == row.end()) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (row[i] && !row[i]->ok) {
          out << "  k=" << config.orders[i] << " failed: " << row[i]->message << "\n";
        }
      }
      out << "\n";
      continue;
    }

    out << pad("h", kCol);
    for (const int order : config.orders) {
      out << "| " << pad("L2(k=" + std::to_string(order) + ")", kCol)
          << pad("H1(k=" + std::to_string(order) + ")", kCol);
    }
    out << "\n";
    const ConvergenceRecord& axis = (*ok_it)->record;
    for (int l = 0; l < axis.levels(); ++l) {
      out << pad(sci4(axis.h[l]), kCol);
      for (const StudyRecord* r : row) {
        if (r && r->ok && l < r->record.levels()) {
          out << "| " << pad(sci4(r->record.l2_error[l]), kCol)
              << pad(sci4(r->record.h1_error[l]), kCol);
        } else {
          out << "| " << pad("failed", kCol) << pad("failed", kCol);
        }
      }
      out << "\n";
    }
    const auto rate_cell = [&](const RateSummary& s, bool last) {
      if (s.exact) return std::string("exact");
      return fixed3(last ? s.last_interval : s.least_squares);
    };
    out << pad("rate(lsq)", kCol);
    for (const StudyRecord* r : row) {
      if (r && r->ok) {
        out << "| " << pad(rate_cell(r->l2_rate, false), kCol)
            << pad(rate_cell(r->h1_rate, false), kCol);
      } else {
        out << "| " << pad("failed", kCol) << pad("failed", kCol);
      }
    }
    out << "\n" << pad("rate(last)", kCol);
    for (const StudyRecord* r : row) {
      if (r && r->ok) {
        out << "| " << pad(rate_cell(r->l2_rate, true), kCol)
            << pad(rate_cell(r->h1_rate, true), kCol);
      } else {
        out << "| " << pad("failed", kCol) << pad("failed", kCol);
      }
    }
    out << "\n\n";
  }
  return out.str();
}

void run_single(const StudyConfig& config, int order, const Ratio& ratio, int level,
                std::ostream& log) {
  validate_config(config);
  if (order < 1 || order > 4) throw ValidationError("order must lie in 1..4");
  if (level < 0 || level >= config.levels) throw ValidationError("level out of range");
  std::filesystem::create_directories(config.out_dir);

  const InterfaceProblem prob = resolve_problem(config.problem, order);
  const int n1 = config.base_edges * ratio.side1 << level;
  const int n2 = config.base_edges * ratio.side2 << level;
  const auto sol =
      solve_level(prob, order, n1, n2, config.coupling_options(), config.solve_options());
  const LevelMetrics m = measure_level(*sol, prob);
  log << "solved " << config.problem << " k=" << order << " ratio=" << ratio.label()
      << " level=" << level << ": h=" << sci4(m.h) << " dofs=" << m.dofs
      << " L2=" << sci4(m.error.l2) << " H1=" << sci4(m.error.h1)
      << " residual=" << sci4(sol->report.relative_residual) << "\n";

  const std::string stem = config.problem + "_" + std::to_string(order) + "_" + ratio.label() +
                           "_L" + std::to_string(level);
  const std::filesystem::path dir(config.out_dir);

  const auto side_table = [&](const Mesh2D& mesh, const Eigen::VectorXd& u,
                              const SideData& side) {
    std::ostringstream t;
    t << "x,y,u_h,u_exact\n";
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      const Vec2 p = mesh.vertices[v];
      t << sci10(p.x) << ',' << sci10(p.y) << ',' << sci10(u[static_cast<int>(v)]) << ','
        << sci10(side.u(p)) << '\n';
    }
    return t.str();
  };
  write_text_file(dir / (stem + "_side1.csv"), side_table(sol->mesh1, sol->u1(), prob.side[0]));
  write_text_file(dir / (stem + "_side2.csv"), side_table(sol->mesh2, sol->u2(), prob.side[1]));

  {
    const Eigen::VectorXd lambda = sol->lambda();
    std::ostringstream t;
    t << "x,y,lambda_h,trace_exact\n";
    for (int j = 0; j < sol->w1->n_dofs(); ++j) {
      const Vec2 p = trace_dof_coord(*sol->w1, j);
      t << sci10(p.x) << ',' << sci10(p.y) << ',' << sci10(lambda[j]) << ','
        << sci10(prob.side[0].u(eta(sol->w1->chain(), p))) << '\n';
    }
    write_text_file(dir / (stem + "_lambda.csv"), t.str());
  }
  {
    const Eigen::VectorXd rho = sol->rho();
    const BoundaryChain& chain = sol->w2->chain();
    std::ostringstream t;
    t << "x,y,rho_h,flux_exact\n";
    for (int j = 0; j < sol->w2->n_dofs(); ++j) {
      const Vec2 p = trace_dof_coord(*sol->w2, j);
      const Vec2 on_circle = eta(chain, p);
      const Vec2 n = (on_circle - chain.circle.center) *
                     (chain.normal_sign / chain.circle.radius);
      t << sci10(p.x) << ',' << sci10(p.y) << ',' << sci10(rho[j]) << ','
        << sci10(prob.side[1].p * dot(prob.side[1].grad_u(on_circle), n)) << '\n';
    }
    write_text_file(dir / (stem + "_rho.csv"), t.str());
  }
  log << "wrote " << stem << "_{side1,side2,lambda,rho}.csv to " << config.out_dir << "\n";
}

std::string check_geometry_report(int base_edges, int levels) {
  if (base_edges < 8 || base_edges % 2 != 0) {
    throw ValidationError("base_edges must be even and >= 8");
  }
  if (levels < 1 || levels > 8) throw ValidationError("levels must be in 1..8");
  const Circle circle{{0.0, 0.0}, 0.25};
  std::ostringstream out;
  out << "cross-map diagnostics: disk chain (n) against annulus chain (2n)\n";
  out << pad("n", 8) << pad("roundtrip", 14) << pad("sagitta_gap", 14) << pad("sup|J-1|", 14)
      << pad("sup|J-1|/h", 14) << pad("fd_gap", 14) << "\n";

  std::vector<double> sup_j;
  for (int l = 0; l < levels; ++l) {
    const int n = base_edges << l;
    const Mesh2D m1 = build_disk_mesh(circle, n);
    const Mesh2D m2 = build_annulus_mesh(circle, 0.5, 2 * n);
    const BoundaryChain c1 = extract_chain(m1, BoundaryTag::Interface);
    const BoundaryChain c2 = extract_chain(m2, BoundaryTag::Interface);

    const auto& gauss = edge_gauss(5);
    double roundtrip = 0.0, supj = 0.0, fd_gap = 0.0;
    for (const BoundaryChain* c : {&c1, &c2}) {
      const BoundaryChain& other = (c == &c1) ? c2 : c1;
      for (int e = 0; e < c->n_edges(); ++e) {
        for (const auto& gp : gauss) {
          const Vec2 xi = c->p0[e] + (c->p1[e] - c->p0[e]) * gp.t;
          const ChainPoint back = zeta(*c, eta(*c, xi));
          roundtrip = std::max(roundtrip, dist(back.p, xi));
          const double j = cross_jacobian(*c, other, xi);
          supj = std::max(supj, std::abs(j - 1.0));

          // Arc-length finite difference along the chord, skipping samples
          // whose stencil straddles a target-chain vertex.
          const double delta = 1e-7;
          const Vec2 t = (c->p1[e] - c->p0[e]) * (1.0 / c->edge_len[e]);
          if (gp.t * c->edge_len[e] < delta || (1.0 - gp.t) * c->edge_len[e] < delta) continue;
          const ChainPoint plus = cross_map(*c, other, xi + t * delta);
          const ChainPoint minus = cross_map(*c, other, xi - t * delta);
          if (plus.edge != minus.edge) continue;
          const double j_fd = dist(plus.p, minus.p) / (2.0 * delta);
          fd_gap = std::max(fd_gap, std::abs(j_fd - j) / std::abs(j));
        }
      }
    }
    const double sagitta_gap =
        std::max(std::abs(max_projection_offset(c1) -
                          circle.radius * (1.0 - std::cos(pi / c1.n_edges()))),
                 std::abs(max_projection_offset(c2) -
                          circle.radius * (1.0 - std::cos(pi / c2.n_edges()))));
    const double h = two_pi * circle.radius / n;  // arc step of the coarser chain
    sup_j.push_back(supj);
    out << pad(std::to_string(n), 8) << pad(sci4(roundtrip), 14) << pad(sci4(sagitta_gap), 14)
        << pad(sci4(supj), 14) << pad(fixed3(supj / h), 14) << pad(sci4(fd_gap), 14) << "\n";
  }
  if (sup_j.size() >= 2) {
    out << "sup|J-1| decay ratios per refinement:";
    for (size_t i = 0; i + 1 < sup_j.size(); ++i) out << ' ' << fixed3(sup_j[i + 1] / sup_j[i]);
    out << " (ratios <= 0.5 confirm the first-order distortion bound;"
           " the h-scaled constant stays bounded)\n";
  }
  return out.str();
}

}  // namespace pefem

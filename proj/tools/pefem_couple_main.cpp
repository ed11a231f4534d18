#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pefem/errors.hpp"
#include "pefem/harness.hpp"

namespace {

using pefem::StudyConfig;

// Config-field overrides shared by `study` and `solve`; values only apply
// when the flag was passed, so file and default values survive otherwise.
struct ConfigFlags {
  std::string config_path, problem, orders_text, ratios_text, solver, out_dir;
  int base_edges = 0, levels = 0, edge_points = 0;
  double c_theta = 0.0, theta_exponent = 0.0, solver_tol = 0.0;

  CLI::Option* config_opt = nullptr;

  void attach(CLI::App* cmd) {
    config_opt = cmd->add_option("--config", config_path, "JSON study configuration file");
    cmd->add_option("--problem", problem,
                    "problem name (gaussian_disk_annulus, patch_generic, patch_radial, "
                    "patch_radial_unit)");
    cmd->add_option("--orders", orders_text, "comma-separated element orders, e.g. 2,3,4");
    cmd->add_option("--ratios", ratios_text, "comma-separated interface ratios, e.g. 1:1,2:1");
    cmd->add_option("--base-edges", base_edges, "interface edge count at the coarsest level");
    cmd->add_option("--levels", levels, "refinement level count (>= 3)");
    cmd->add_option("--c-theta", c_theta, "penalty constant (0 = automatic)");
    cmd->add_option("--theta-exponent", theta_exponent, "penalty mesh-size exponent");
    cmd->add_option("--edge-points", edge_points, "interface Gauss points per edge (0 = auto)");
    cmd->add_option("--solver", solver, "linear solver: direct or iterative");
    cmd->add_option("--solver-tol", solver_tol, "iterative solver tolerance");
    cmd->add_option("--out", out_dir, "output directory");
  }

  StudyConfig build(const CLI::App* cmd) const {
    StudyConfig c =
        config_path.empty() ? StudyConfig{} : pefem::load_config_file(config_path);
    if (cmd->count("--problem")) c.problem = problem;
    if (cmd->count("--orders")) c.orders = pefem::parse_int_list(orders_text);
    if (cmd->count("--ratios")) {
      c.ratios.clear();
      std::stringstream ss(ratios_text);
      std::string item;
      while (std::getline(ss, item, ',')) c.ratios.push_back(pefem::parse_ratio(item));
    }
    if (cmd->count("--base-edges")) c.base_edges = base_edges;
    if (cmd->count("--levels")) c.levels = levels;
    if (cmd->count("--c-theta")) c.c_theta = c_theta;
    if (cmd->count("--theta-exponent")) c.theta_exponent = theta_exponent;
    if (cmd->count("--edge-points")) c.edge_points = edge_points;
    if (cmd->count("--solver")) c.solver = solver;
    if (cmd->count("--solver-tol")) c.solver_tol = solver_tol;
    if (cmd->count("--out")) c.out_dir = out_dir;
    pefem::validate_config(c);
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Coupled elliptic interface solver: polynomial-extension coupling of a disk and an "
      "annulus across nonmatching polygonal interface approximations"};
  app.require_subcommand(1);

  CLI::App* study = app.add_subcommand("study", "run a convergence study and write CSV tables");
  ConfigFlags study_flags;
  study_flags.attach(study);

  CLI::App* solve = app.add_subcommand("solve", "solve one level and dump solution tables");
  ConfigFlags solve_flags;
  solve_flags.attach(solve);
  int solve_order = 2;
  std::string solve_ratio = "1:1";
  int solve_level_index = 0;
  solve->add_option("--order", solve_order, "element order")->required();
  solve->add_option("--ratio", solve_ratio, "interface ratio, e.g. 2:1")->required();
  solve->add_option("--level", solve_level_index, "refinement level index (0-based)");

  CLI::App* geom = app.add_subcommand("check-geometry", "print cross-map diagnostics");
  int geom_edges = 8;
  int geom_levels = 3;
  geom->add_option("--base-edges", geom_edges, "coarsest chain edge count");
  geom->add_option("--levels", geom_levels, "number of refinement levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (study->parsed()) {
      const StudyConfig config = study_flags.build(study);
      const auto records = pefem::run_study(config, std::cout);
      bool all_ok = true;
      for (const auto& r : records) all_ok = all_ok && r.ok;
      std::cout << "wrote " << config.out_dir << "/summary.txt\n";
      if (!all_ok) throw pefem::NumericalError("one or more study combinations failed");
    } else if (solve->parsed()) {
      const StudyConfig config = solve_flags.build(solve);
      pefem::run_single(config, solve_order, pefem::parse_ratio(solve_ratio),
                        solve_level_index, std::cout);
    } else {
      std::cout << pefem::check_geometry_report(geom_edges, geom_levels);
    }
  } catch (const pefem::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

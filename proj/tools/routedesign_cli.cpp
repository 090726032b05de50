// Command-line runner: solve, design, sweep, gap.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "routedesign/errors.hpp"
#include "routedesign/experiment.hpp"

namespace rd = routedesign;
namespace ex = routedesign::experiment;

namespace {

void add_common(CLI::App* cmd, ex::ExperimentConfig& cfg, double& lambda, int& max_iters) {
  cmd->add_option("--scenario", cfg.scenario, "built-in scenario: two_player_3x3, four_player_5x5");
  cmd->add_option("--game", cfg.game_path, "game JSON file");
  cmd->add_option("--lambda", lambda, "entropy weight")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", cfg.design.alpha, "step size")->check(CLI::NonNegativeNumber);
  cmd->add_option("--rho", cfg.design.rho, "Frobenius radius of C")->check(CLI::NonNegativeNumber);
  cmd->add_option("--delta", cfg.design.delta, "initial cost and upper bound of b")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--eps", cfg.design.epsilon, "stopping tolerance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-iters", max_iters, "outer iteration cap")->check(CLI::PositiveNumber);
  cmd->add_flag("--homotopy", cfg.homotopy, "continue lambda down from 1.0");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "random seed (unused by the deterministic pipeline)");
}

void print_report(const ex::RunReport& r) {
  std::cout << "psi_bar " << rd::io::format_number(r.psi_bar) << "\n"
            << "gap " << rd::io::format_number(r.gap) << "\n"
            << "path_match " << (r.path_match ? "true" : "false") << "\n"
            << "iterations " << r.trace.rows.size() << "\n"
            << "trace " << r.trace_path << "\n"
            << "designed_game " << r.output_path << "\n"
            << "wall_seconds " << r.wall_seconds << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-regularized equilibria and cost design for atomic routing games"};
  app.require_subcommand(1);

  ex::ExperimentConfig cfg;
  double lambda = cfg.design.lambda;
  int max_iters = cfg.design.max_outer_iters;
  std::vector<double> lambda_list;
  std::vector<double> rho_list;

  auto* solve = app.add_subcommand("solve", "solve the smooth equilibrium");
  add_common(solve, cfg, lambda, max_iters);
  auto* design = app.add_subcommand("design", "run the projected gradient cost design");
  add_common(design, cfg, lambda, max_iters);
  auto* sweep = app.add_subcommand("sweep", "one design run per lambda or rho value");
  add_common(sweep, cfg, lambda, max_iters);
  auto* lambda_opt = sweep->add_option("--lambda-list", lambda_list, "lambda values")
                         ->delimiter(',')
                         ->check(CLI::PositiveNumber);
  auto* rho_opt = sweep->add_option("--rho-list", rho_list, "rho values")
                      ->delimiter(',')
                      ->check(CLI::NonNegativeNumber);
  lambda_opt->excludes(rho_opt);
  auto* gap = app.add_subcommand("gap", "Nash gap certificate");
  add_common(gap, cfg, lambda, max_iters);
  gap->add_option("--flow", cfg.flow_path, "equilibrium.json whose flow is certified");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto* active = app.get_subcommands().front();
  cfg.design.lambda = lambda;
  cfg.design.max_outer_iters = max_iters;
  if (active->count("--lambda") > 0) cfg.lambda_override = lambda;
  cfg.rho_explicit = active->count("--rho") > 0;

  try {
    if (active == solve) {
      const ex::RunReport r = ex::cmd_solve(cfg);
      std::cout << "lambda " << rd::io::format_number(r.solution.lambda) << "\n"
                << "residual " << rd::io::format_number(r.residual) << "\n"
                << "gap " << rd::io::format_number(r.gap) << "\n"
                << "iterations " << r.solution.iterations << "\n"
                << "equilibrium " << r.output_path << "\n";
    } else if (active == design) {
      print_report(ex::cmd_design(cfg));
    } else if (active == sweep) {
      if (lambda_list.empty() && rho_list.empty()) {
        std::cerr << "error: sweep needs --lambda-list or --rho-list\n";
        return 1;
      }
      const bool by_lambda = !lambda_list.empty();
      const ex::SweepOutcome out =
          ex::cmd_sweep(cfg, by_lambda ? ex::SweepParam::lambda : ex::SweepParam::rho,
                        by_lambda ? lambda_list : rho_list);
      for (const auto& row : out.rows) {
        std::cout << (by_lambda ? "lambda " : "rho ") << rd::io::format_number(row.param)
                  << " psi_final " << rd::io::format_number(row.psi_final) << "\n";
      }
      for (const auto& f : out.failures) std::cerr << "failed: " << f << "\n";
    } else if (active == gap) {
      const ex::GapReport r = ex::cmd_gap(cfg);
      std::cout << "gap " << rd::io::format_number(r.gap) << "\n";
      for (std::size_t i = 0; i < r.per_player.size(); ++i) {
        std::cout << "player " << i + 1 << " " << rd::io::format_number(r.per_player[i]) << "\n";
      }
      std::cout << "kkt_residual " << rd::io::format_number(r.kkt_residual) << "\n"
                << "conservation " << rd::io::format_number(r.conservation) << "\n";
    }
  } catch (const rd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const rd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

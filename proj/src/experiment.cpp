#include "routedesign/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "routedesign/errors.hpp"
#include "routedesign/scenarios.hpp"

namespace routedesign::experiment {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

}  // namespace

ResolvedGame resolve_game(const ExperimentConfig& config) {
  if (config.scenario.has_value() == config.game_path.has_value()) {
    throw ValidationError("exactly one of --scenario and --game is required");
  }
  if (config.scenario) {
    Scenario sc = make_scenario(*config.scenario, config.design.delta, config.design.rho);
    return {std::move(sc.game), std::move(sc.desired_paths)};
  }
  const io::json doc = io::read_json(*config.game_path);
  AtomicRoutingGame game = io::game_from_json(doc);
  auto paths = io::desired_paths_from_json(doc, game.graph());
  return {std::move(game), std::move(paths)};
}

RunReport cmd_solve(const ExperimentConfig& config) {
  const auto start = Clock::now();
  const ResolvedGame resolved = resolve_game(config);
  const AtomicRoutingGame& game = resolved.game;

  SmoothEqSettings settings = config.design.inner;
  EquilibriumSolution sol;
  if (config.homotopy) {
    HomotopySchedule schedule = config.design.reference;
    if (config.lambda_override) schedule.lambda_min = *config.lambda_override;
    schedule.lambda_start = std::max(schedule.lambda_start, schedule.lambda_min);
    sol = homotopy_solve(game, schedule, settings);
  } else {
    settings.lambda = config.design.lambda;
    sol = solve_nls(game, settings);
    if (!sol.converged) {
      throw NotConverged("solver stopped at residual " + std::to_string(sol.residual_norm) +
                         " after " + std::to_string(sol.iterations) + " iterations");
    }
  }

  RunReport report;
  report.solution = sol;
  report.costs = game.costs();
  report.residual = sol.residual_norm;
  report.gap = nash_gap(game, sol.x);
  report.output_path = join(ensure_dir(config.out_dir), "equilibrium.json");
  io::write_text(report.output_path, io::equilibrium_to_json(sol, report.gap).dump(2) + "\n");
  report.wall_seconds = seconds_since(start);
  return report;
}

RunReport cmd_design(const ExperimentConfig& config) {
  const auto start = Clock::now();
  const ResolvedGame resolved = resolve_game(config);
  if (resolved.desired_paths.empty()) {
    throw ValidationError("design needs desired paths (scenario or \"desired_paths\" in the game)");
  }
  const FlowProfile target = path_to_target(resolved.game, resolved.desired_paths);
  const DesignObjective objective = tracking_objective(target);

  DesignConfig design = config.design;
  if (config.game_path && !config.rho_explicit) design.rho = resolved.game.rho();

  const DesignResult result = design_loop(resolved.game, objective, design);
  const AtomicRoutingGame designed = AtomicRoutingGame(
      resolved.game.graph(), resolved.game.players(), result.costs, design.rho);
  const DesignVerification check =
      verify_design(designed, target, design.reference, design.inner);

  const std::string dir = ensure_dir(config.out_dir);
  RunReport report;
  report.costs = result.costs;
  report.trace = result.trace;
  report.psi_bar = check.psi;
  report.gap = check.gap;
  report.path_match = check.path_match;
  report.residual = result.trace.rows.back().residual;
  report.trace_path = join(dir, "trace.csv");
  report.output_path = join(dir, "designed_game.json");
  io::write_text(report.trace_path, io::trace_to_csv(result.trace));
  io::save_game(report.output_path, designed, resolved.desired_paths);
  report.wall_seconds = seconds_since(start);
  return report;
}

SweepOutcome cmd_sweep(const ExperimentConfig& config, SweepParam param,
                       const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  const std::string dir = ensure_dir(config.out_dir);
  const char* label = param == SweepParam::lambda ? "lambda" : "rho";
  SweepOutcome outcome;
  for (std::size_t k = 0; k < values.size(); ++k) {
    ExperimentConfig run = config;
    if (param == SweepParam::lambda) {
      run.design.lambda = values[k];
    } else {
      run.design.rho = values[k];
    }
    run.out_dir = join(dir, std::string(label) + "_" + std::to_string(k));
    try {
      RunReport report = cmd_design(run);
      outcome.rows.push_back({values[k], report.psi_bar});
      outcome.reports.push_back(std::move(report));
    } catch (const Error& e) {
      outcome.rows.push_back({values[k], std::numeric_limits<double>::quiet_NaN()});
      outcome.failures.push_back(std::string(label) + "=" + io::format_number(values[k]) + ": " +
                                 e.what());
    }
  }
  io::write_text(join(dir, "sweep.csv"), io::sweep_to_csv(outcome.rows));
  return outcome;
}

GapReport cmd_gap(const ExperimentConfig& config) {
  const ResolvedGame resolved = resolve_game(config);
  const AtomicRoutingGame& game = resolved.game;
  FlowProfile x;
  if (config.flow_path) {
    x = io::equilibrium_from_json(io::read_json(*config.flow_path)).x;
    if (x.size() != game.flow_dim()) throw ValidationError("flow file does not match the game");
  } else {
    x = reference_equilibrium(game, config.design.reference, config.design.inner).solution.x;
  }
  GapReport report;
  report.conservation = conservation_violation(game, x);
  report.per_player = nash_gap_terms(game, x);
  for (double t : report.per_player) report.gap += t;
  report.kkt_residual = kkt_residual(game, x, potential_certificate(game, x));
  return report;
}

}  // namespace routedesign::experiment

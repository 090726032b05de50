#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "routedesign/design.hpp"
#include "routedesign/io.hpp"

namespace routedesign::experiment {

struct ExperimentConfig {
  std::optional<std::string> scenario;
  std::optional<std::string> game_path;
  DesignConfig design;
  bool homotopy = false;
  std::optional<double> lambda_override;  // --lambda given explicitly
  bool rho_explicit = false;              // otherwise a game file's rho is used
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::optional<std::string> flow_path;  // `gap`: equilibrium.json to certify
};

// Game and desired paths resolved from a scenario name or a game file.
struct ResolvedGame {
  AtomicRoutingGame game;
  std::vector<std::vector<LinkId>> desired_paths;
};

ResolvedGame resolve_game(const ExperimentConfig& config);

struct RunReport {
  CostParams costs;
  double psi_bar = 0.0;
  double gap = 0.0;
  bool path_match = false;
  double residual = 0.0;
  double wall_seconds = 0.0;
  std::string trace_path;
  std::string output_path;
  DesignTrace trace;
  EquilibriumSolution solution;
};

// Smooth equilibrium at config.design.lambda, or a homotopy down to the
// requested lambda (1e-3 by default) with --homotopy. Writes equilibrium.json.
RunReport cmd_solve(const ExperimentConfig& config);

// design_loop + verify_design. Writes trace.csv and designed_game.json.
RunReport cmd_design(const ExperimentConfig& config);

enum class SweepParam { lambda, rho };

struct SweepOutcome {
  std::vector<io::SweepRow> rows;
  std::vector<RunReport> reports;
  std::vector<std::string> failures;  // "param=<v>: message"
};

// One design run per value in `<out>/<param>_<k>/`, final psi_bar collected
// in `<out>/sweep.csv`. Failed runs are recorded with psi_final = nan.
SweepOutcome cmd_sweep(const ExperimentConfig& config, SweepParam param,
                       const std::vector<double>& values);

struct GapReport {
  double gap = 0.0;
  std::vector<double> per_player;
  double kkt_residual = 0.0;  // with the shortest-path potential certificate
  double conservation = 0.0;
};

// Nash gap of the flow in config.flow_path, or of the certified reference
// equilibrium when no flow is given.
GapReport cmd_gap(const ExperimentConfig& config);

}  // namespace routedesign::experiment

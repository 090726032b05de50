#pragma once

#include <functional>
#include <vector>

#include "routedesign/sensitivity.hpp"

namespace routedesign {

// Euclidean projection onto the box 0 <= b <= delta.
Vector project_B(const Vector& b, double delta);

struct DykstraOptions {
  double tol = 1e-10;  // Frobenius change between sweeps
  int max_sweeps = 100;
};

struct ProjectionResult {
  Matrix C;
  bool converged = false;
  int sweeps = 0;
};

// Frobenius-nearest matrix in
//   D = {C : C + C^T psd, ||C||_F <= rho, diagonal m x m blocks symmetric}
// by Dykstra's alternating projections. Not converging within the sweep cap
// is reported through `converged`, with the last iterate returned.
ProjectionResult project_D(const Matrix& C, double rho, int block_size, int players,
                           const DykstraOptions& options = {});

struct DesignConfig {
  double alpha = 0.005;
  double lambda = 0.01;
  double delta = 0.1;
  double epsilon = 0.01;
  double rho = 0.5;
  int max_outer_iters = 100;

  SmoothEqSettings inner;              // lambda is overridden by `lambda`
  HomotopySchedule reference;          // schedule for the certified equilibrium
  GradientOptions gradient;
  DykstraOptions dykstra;
};

struct TraceRow {
  int iter = 0;
  double psi_bar = 0.0;     // psi at the certified reference equilibrium
  double psi_lambda = 0.0;  // psi at the inner smooth equilibrium
  double db_norm = 0.0;
  double dC_norm = 0.0;
  double residual = 0.0;    // inner ||F||
  double gap = 0.0;         // Nash gap of the reference equilibrium
};

struct DesignTrace {
  std::vector<TraceRow> rows;
};

struct DesignResult {
  CostParams costs;
  DesignTrace trace;
};

// Called with (iteration, parameters solved at that iteration).
using DesignObserver = std::function<void(int, const CostParams&)>;

// Approximate projected gradient method: start from b = delta 1, C = 0 and
// repeat {solve the smooth equilibrium at lambda, step b and C along the
// implicit gradients, project} until both parameter changes drop below
// epsilon or max_outer_iters is reached. The returned costs are the last
// ones an equilibrium was solved for.
DesignResult design_loop(const AtomicRoutingGame& game_template, const DesignObjective& objective,
                         const DesignConfig& config, const DesignObserver& observer = {});

// Certified reference equilibrium: homotopy solve plus Nash gap.
struct ReferenceEquilibrium {
  EquilibriumSolution solution;
  double gap = 0.0;
};

ReferenceEquilibrium reference_equilibrium(const AtomicRoutingGame& game,
                                           const HomotopySchedule& schedule = {},
                                           const SmoothEqSettings& settings = {});

struct DesignVerification {
  double psi = 0.0;
  double gap = 0.0;
  bool path_match = false;
  std::vector<bool> player_match;
  std::vector<std::vector<LinkId>> best_paths;  // per player, under marginal costs at x_bar
  FlowProfile x_bar;
};

// Checks whether every player's best response at the reference equilibrium
// is exactly the support of its target flow.
DesignVerification verify_design(const AtomicRoutingGame& game, const FlowProfile& target,
                                 const HomotopySchedule& schedule = {},
                                 const SmoothEqSettings& settings = {});

}  // namespace routedesign

#pragma once

#include <optional>
#include <vector>

#include "routedesign/game.hpp"

namespace routedesign {

struct SmoothEqSettings {
  double lambda = 0.01;          // entropy weight, > 0
  double residual_tol = 1e-10;   // on ||F||_2
  int max_iters = 500;
  double lm_damping_init = 1e-3;
  double interior_eps = 0.1;     // circulation used by the default starting point
};

struct EquilibriumSolution {
  FlowProfile x;
  Vector v;
  double residual_norm = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct WarmStart {
  FlowProfile x;
  Vector v;
};

struct HomotopySchedule {
  double lambda_start = 1.0;
  double decay = 0.5;
  double lambda_min = 1e-3;
};

// Exponent entries above this are capped; entries above kExponentLimit raise Overflow.
inline constexpr double kExponentCap = 50.0;
inline constexpr double kExponentLimit = 200.0;

// exp((E^T v - b - C x) / lambda - 1), with the exponent capped.
Vector smoothed_response(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                         double lambda);

// F(x, v) = [x - smoothed_response; s - E x].
Vector residual_F(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                  double lambda);

// dF/d(x, v) = [I + D C / lambda, -D E^T / lambda; -E, 0] with
// D = diag(smoothed_response).
Matrix jacobian_F(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                  double lambda);

// Stacked interior flows of every player with circulation `eps`.
FlowProfile interior_joint_flow(const AtomicRoutingGame& game, double eps);

struct SolveTrace {
  std::vector<double> residuals;  // ||F|| after every LM iteration
};

// Levenberg-Marquardt on ||F||^2. Returns the best iterate; `converged` is
// false when max_iters is hit or the damping blows up. Without a warm start
// the solve begins at the interior flow with v = 0; if that fails for
// lambda < 1 it is retried by continuation from lambda = 1 (halving).
// `iterations` counts LM steps over all attempts.
EquilibriumSolution solve_nls(const AtomicRoutingGame& game, const SmoothEqSettings& settings,
                              const std::optional<WarmStart>& warm_start = std::nullopt,
                              SolveTrace* trace = nullptr);

// Solves at lambda_start, then at max(lambda * decay, lambda_min) warm-started
// from the previous stage until lambda_min is reached. settings.lambda is
// ignored. Throws NotConverged naming the failing lambda. When `stages` is
// given, every stage solution is appended to it.
EquilibriumSolution homotopy_solve(const AtomicRoutingGame& game, const HomotopySchedule& schedule,
                                   const SmoothEqSettings& settings,
                                   std::vector<EquilibriumSolution>* stages = nullptr,
                                   const std::optional<WarmStart>& warm_start = std::nullopt);

// Left-hand side of the entropy-regularized stationarity condition,
// b + C x + lambda (ln x + 1) - E^T v. Zero at a solution.
Vector entropy_stationarity(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                            double lambda);

}  // namespace routedesign

#include "routedesign/design.hpp"

#include <string>

#include "routedesign/errors.hpp"

namespace routedesign {

namespace {

Matrix symmetrize_diagonal_blocks(Matrix c, int m, int p) {
  for (int i = 0; i < p; ++i) {
    auto block = c.block(i * m, i * m, m, m);
    const Matrix sym = 0.5 * (block + block.transpose());
    block = sym;
  }
  return c;
}

// Nearest matrix whose symmetric part is psd; the skew part is untouched.
Matrix project_psd_symmetric_part(const Matrix& c) {
  const Matrix sym = 0.5 * (c + c.transpose());
  const Matrix skew = 0.5 * (c - c.transpose());
  const numerics::SymmetricEigen eig = numerics::eig_sym(sym);
  if (eig.values.minCoeff() >= 0.0) return c;
  const Vector clipped = eig.values.cwiseMax(0.0);
  return eig.vectors * clipped.asDiagonal() * eig.vectors.transpose() + skew;
}

Matrix project_ball(const Matrix& c, double rho) {
  const double norm = c.norm();
  if (norm <= rho) return c;
  if (rho == 0.0) return Matrix::Zero(c.rows(), c.cols());
  return c * (rho / norm);
}

std::string at_iteration(int iter, const std::string& what) {
  return "design iteration " + std::to_string(iter) + ": " + what;
}

}  // namespace

Vector project_B(const Vector& b, double delta) {
  if (!(delta >= 0.0)) throw ValidationError("delta must be nonnegative");
  return b.cwiseMax(0.0).cwiseMin(delta);
}

ProjectionResult project_D(const Matrix& C, double rho, int block_size, int players,
                           const DykstraOptions& options) {
  if (!(rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  if (C.rows() != C.cols() || C.rows() != static_cast<Eigen::Index>(block_size) * players) {
    throw ValidationError("project_D: matrix must be (p*m) x (p*m)");
  }
  const Eigen::Index n = C.rows();
  Matrix x = C;
  Matrix inc_blocks = Matrix::Zero(n, n);
  Matrix inc_psd = Matrix::Zero(n, n);
  Matrix inc_ball = Matrix::Zero(n, n);

  ProjectionResult out;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const Matrix previous = x;

    Matrix y = symmetrize_diagonal_blocks(x + inc_blocks, block_size, players);
    inc_blocks += x - y;
    x = std::move(y);

    y = project_psd_symmetric_part(x + inc_psd);
    inc_psd += x - y;
    x = std::move(y);

    y = project_ball(x + inc_ball, rho);
    inc_ball += x - y;
    x = std::move(y);

    out.sweeps = sweep;
    if ((x - previous).norm() <= options.tol) {
      out.converged = true;
      break;
    }
  }
  out.C = std::move(x);
  return out;
}

ReferenceEquilibrium reference_equilibrium(const AtomicRoutingGame& game,
                                           const HomotopySchedule& schedule,
                                           const SmoothEqSettings& settings) {
  ReferenceEquilibrium ref;
  ref.solution = homotopy_solve(game, schedule, settings);
  ref.gap = nash_gap(game, ref.solution.x);
  return ref;
}

DesignResult design_loop(const AtomicRoutingGame& game_template, const DesignObjective& objective,
                         const DesignConfig& config, const DesignObserver& observer) {
  if (!(config.alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
  if (!(config.lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(config.delta >= 0.0)) throw ValidationError("delta must be nonnegative");
  if (!(config.epsilon >= 0.0)) throw ValidationError("epsilon must be nonnegative");
  if (!(config.rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  if (config.max_outer_iters <= 0) throw ValidationError("max_outer_iters must be positive");
  if (objective.dim != game_template.flow_dim()) {
    throw ValidationError("objective dimension does not match the game");
  }
  if (!graph_rank_check(game_template.graph())) {
    throw ValidationError("incidence matrix rank is not n - 1");
  }

  const int m = game_template.num_links();
  const int p = game_template.num_players();
  const int dim = game_template.flow_dim();

  CostParams current{Vector::Constant(dim, config.delta), Matrix::Zero(dim, dim), m};
  SmoothEqSettings inner = config.inner;
  inner.lambda = config.lambda;
  HomotopySchedule to_lambda = config.reference;
  to_lambda.lambda_min = config.lambda;
  to_lambda.lambda_start = std::max(config.reference.lambda_start, config.lambda);

  DesignResult result;
  std::optional<WarmStart> warm;
  for (int iter = 1; iter <= config.max_outer_iters; ++iter) {
    const AtomicRoutingGame game = game_template.with_costs(current);
    if (observer) observer(iter, current);

    EquilibriumSolution sol;
    try {
      if (warm) sol = solve_nls(game, inner, warm);
      if (!warm || !sol.converged) sol = homotopy_solve(game, to_lambda, inner);
    } catch (const Error& e) {
      throw NotConverged(at_iteration(iter, e.what()));
    }

    ReferenceEquilibrium ref;
    try {
      ref = reference_equilibrium(game, config.reference, config.inner);
    } catch (const Error& e) {
      throw NotConverged(at_iteration(iter, std::string("reference equilibrium: ") + e.what()));
    }

    const GradientPair grad = implicit_gradients(game, sol, objective, config.gradient);
    const Vector b_next = project_B(current.b - config.alpha * grad.grad_b, config.delta);
    const ProjectionResult c_next =
        project_D(current.C - config.alpha * grad.grad_C(), config.rho, m, p, config.dykstra);

    TraceRow row;
    row.iter = iter;
    row.psi_bar = objective.evaluate(ref.solution.x);
    row.psi_lambda = objective.evaluate(sol.x);
    row.db_norm = (current.b - b_next).norm();
    row.dC_norm = (current.C - c_next.C).norm();
    row.residual = sol.residual_norm;
    row.gap = ref.gap;
    result.trace.rows.push_back(row);

    warm = WarmStart{sol.x, sol.v};
    result.costs = current;
    if (std::max(row.db_norm, row.dC_norm) < config.epsilon) break;
    current = CostParams{b_next, c_next.C, m};
  }
  return result;
}

DesignVerification verify_design(const AtomicRoutingGame& game, const FlowProfile& target,
                                 const HomotopySchedule& schedule,
                                 const SmoothEqSettings& settings) {
  if (target.size() != game.flow_dim()) throw ValidationError("target has wrong length");
  const ReferenceEquilibrium ref = reference_equilibrium(game, schedule, settings);
  DesignVerification out;
  out.x_bar = ref.solution.x;
  out.gap = ref.gap;
  out.psi = tracking_objective(target).evaluate(out.x_bar);
  out.path_match = true;
  const int m = game.num_links();
  for (int i = 0; i < game.num_players(); ++i) {
    const Player& pl = game.players()[i];
    const ShortestPath best =
        shortest_path_cost(game.graph(), marginal_cost(game, out.x_bar, i), pl.origin,
                           pl.destination);
    bool match = true;
    for (int j = 0; j < m; ++j) {
      const bool in_target = target(i * m + j) > 0.5;
      if (in_target != (best.flow(j) > 0.5)) match = false;
    }
    out.player_match.push_back(match);
    out.best_paths.push_back(best.links);
    out.path_match = out.path_match && match;
  }
  return out;
}

}  // namespace routedesign

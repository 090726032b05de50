#include "routedesign/smooth_eq.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "routedesign/errors.hpp"

namespace routedesign {

namespace {

constexpr double kMaxDamping = 1e16;
constexpr double kMinDamping = 1e-16;

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
}

void check_dims(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v) {
  if (x.size() != game.flow_dim()) throw ValidationError("flow vector has wrong length");
  if (v.size() != game.multiplier_dim()) throw ValidationError("multiplier vector has wrong length");
}

std::string lambda_str(double lambda) {
  std::ostringstream os;
  os << lambda;
  return os.str();
}

}  // namespace

Vector smoothed_response(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                         double lambda) {
  check_lambda(lambda);
  check_dims(game, x, v);
  const auto& costs = game.costs();
  Vector z = (game.stacked_incidence().transpose() * v - costs.b - costs.C * x) / lambda;
  z.array() -= 1.0;
  const double top = z.maxCoeff();
  if (!std::isfinite(top) || top > kExponentLimit) {
    throw Overflow("exponent " + std::to_string(top) + " exceeds limit at lambda " +
                   lambda_str(lambda));
  }
  return z.cwiseMin(kExponentCap).array().exp().matrix();
}

Vector residual_F(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                  double lambda) {
  const Vector response = smoothed_response(game, x, v, lambda);
  Vector f(game.flow_dim() + game.multiplier_dim());
  f.head(game.flow_dim()) = x - response;
  f.tail(game.multiplier_dim()) = game.s() - game.stacked_incidence() * x;
  return f;
}

Matrix jacobian_F(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                  double lambda) {
  const Vector d = smoothed_response(game, x, v, lambda);
  const int nx = game.flow_dim();
  const int nv = game.multiplier_dim();
  const Matrix& e = game.stacked_incidence();
  Matrix j = Matrix::Zero(nx + nv, nx + nv);
  j.topLeftCorner(nx, nx) = (d / lambda).asDiagonal() * game.costs().C;
  j.topLeftCorner(nx, nx).diagonal().array() += 1.0;
  j.topRightCorner(nx, nv) = (-d / lambda).asDiagonal() * e.transpose();
  j.bottomLeftCorner(nv, nx) = -e;
  return j;
}

FlowProfile interior_joint_flow(const AtomicRoutingGame& game, double eps) {
  const int m = game.num_links();
  FlowProfile x(game.flow_dim());
  for (int i = 0; i < game.num_players(); ++i) {
    const Player& pl = game.players()[i];
    x.segment(i * m, m) = interior_flow(game.graph(), pl.origin, pl.destination, eps);
  }
  return x;
}

namespace {

// Levenberg-Marquardt from (x, v) at settings.lambda.
EquilibriumSolution levenberg_marquardt(const AtomicRoutingGame& game,
                                        const SmoothEqSettings& settings, FlowProfile x, Vector v,
                                        SolveTrace* trace) {
  const double lambda = settings.lambda;
  const int nx = game.flow_dim();
  EquilibriumSolution sol;
  sol.lambda = lambda;
  sol.x = std::move(x);
  sol.v = std::move(v);

  Vector r = residual_F(game, sol.x, sol.v, lambda);
  double norm = r.norm();
  double damping = settings.lm_damping_init;
  int iter = 0;
  while (norm > settings.residual_tol && iter < settings.max_iters && damping < kMaxDamping) {
    ++iter;
    const Matrix j = jacobian_F(game, sol.x, sol.v, lambda);
    const Vector step = numerics::lstsq(j, -r, damping);
    const FlowProfile x_trial = sol.x + step.head(nx);
    const Vector v_trial = sol.v + step.tail(game.multiplier_dim());
    bool accepted = false;
    try {
      Vector r_trial = residual_F(game, x_trial, v_trial, lambda);
      const double trial_norm = r_trial.norm();
      if (trial_norm < norm) {
        sol.x = x_trial;
        sol.v = v_trial;
        r = std::move(r_trial);
        norm = trial_norm;
        accepted = true;
      }
    } catch (const Overflow&) {
      // rejected like any other non-improving step
    }
    damping = accepted ? std::max(damping / 10.0, kMinDamping) : damping * 10.0;
    if (trace) trace->residuals.push_back(norm);
  }

  // Entries still nonpositive at this point are numerically zero flows;
  // replace them with their exponential image.
  if (sol.x.minCoeff() <= 0.0) {
    const Vector response = smoothed_response(game, sol.x, sol.v, lambda);
    FlowProfile polished = sol.x;
    for (Eigen::Index k = 0; k < polished.size(); ++k) {
      if (polished(k) <= 0.0) polished(k) = response(k);
    }
    const double polished_norm = residual_F(game, polished, sol.v, lambda).norm();
    if (polished_norm <= std::max(norm, settings.residual_tol)) {
      sol.x = std::move(polished);
      norm = polished_norm;
    }
  }

  sol.residual_norm = norm;
  sol.iterations = iter;
  // ||x - exp(.)|| <= tol already bounds every flow below by -tol.
  sol.converged = norm <= settings.residual_tol;
  return sol;
}

// Cold-start rescue: continuation in lambda from 1 (halving) down to the
// requested value, each stage warm-started from the previous one.
std::optional<EquilibriumSolution> continuation(const AtomicRoutingGame& game,
                                                const SmoothEqSettings& settings,
                                                SolveTrace* trace) {
  SmoothEqSettings stage = settings;
  stage.lambda = std::max(1.0, settings.lambda);
  FlowProfile x = interior_joint_flow(game, settings.interior_eps);
  Vector v = Vector::Zero(game.multiplier_dim());
  int total = 0;
  while (true) {
    EquilibriumSolution sol = levenberg_marquardt(game, stage, x, v, trace);
    total += sol.iterations;
    if (!sol.converged) return std::nullopt;
    if (stage.lambda <= settings.lambda) {
      sol.iterations = total;
      return sol;
    }
    x = std::move(sol.x);
    v = std::move(sol.v);
    stage.lambda = std::max(stage.lambda * 0.5, settings.lambda);
  }
}

}  // namespace

EquilibriumSolution solve_nls(const AtomicRoutingGame& game, const SmoothEqSettings& settings,
                              const std::optional<WarmStart>& warm_start, SolveTrace* trace) {
  check_lambda(settings.lambda);
  if (!(settings.residual_tol > 0.0)) throw ValidationError("residual_tol must be positive");
  if (settings.max_iters <= 0) throw ValidationError("max_iters must be positive");
  if (!(settings.lm_damping_init > 0.0)) throw ValidationError("lm_damping_init must be positive");

  if (warm_start) {
    check_dims(game, warm_start->x, warm_start->v);
    return levenberg_marquardt(game, settings, warm_start->x, warm_start->v, trace);
  }
  EquilibriumSolution sol =
      levenberg_marquardt(game, settings, interior_joint_flow(game, settings.interior_eps),
                          Vector::Zero(game.multiplier_dim()), trace);
  if (sol.converged || settings.lambda >= 1.0) return sol;
  std::optional<EquilibriumSolution> rescued;
  try {
    rescued = continuation(game, settings, trace);
  } catch (const NumericalError&) {
    // keep the direct attempt
  }
  if (rescued) {
    rescued->iterations += sol.iterations;
    return *rescued;
  }
  return sol;
}

EquilibriumSolution homotopy_solve(const AtomicRoutingGame& game, const HomotopySchedule& schedule,
                                   const SmoothEqSettings& settings,
                                   std::vector<EquilibriumSolution>* stages,
                                   const std::optional<WarmStart>& warm_start) {
  if (!(schedule.lambda_min > 0.0) || !(schedule.lambda_start >= schedule.lambda_min)) {
    throw ValidationError("homotopy schedule needs 0 < lambda_min <= lambda_start");
  }
  if (!(schedule.decay > 0.0 && schedule.decay < 1.0)) {
    throw ValidationError("homotopy decay must lie in (0, 1)");
  }
  SmoothEqSettings stage = settings;
  stage.lambda = schedule.lambda_start;
  std::optional<WarmStart> start = warm_start;
  while (true) {
    EquilibriumSolution sol;
    try {
      sol = solve_nls(game, stage, start);
    } catch (const NumericalError& e) {
      throw NotConverged("homotopy stage at lambda " + lambda_str(stage.lambda) + ": " + e.what());
    }
    if (!sol.converged) {
      throw NotConverged("homotopy stage at lambda " + lambda_str(stage.lambda) +
                         " stopped at residual " + lambda_str(sol.residual_norm) + " after " + std::to_string(sol.iterations) + " iterations");
    }
    if (stages) stages->push_back(sol);
    if (stage.lambda <= schedule.lambda_min) return sol;
    start = WarmStart{sol.x, sol.v};
    stage.lambda = std::max(stage.lambda * schedule.decay, schedule.lambda_min);
  }
}

Vector entropy_stationarity(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v,
                            double lambda) {
  check_lambda(lambda);
  check_dims(game, x, v);
  if (x.minCoeff() <= 0.0) throw ValidationError("entropy stationarity needs x > 0");
  Vector out = game.costs().b + game.costs().C * x - game.stacked_incidence().transpose() * v;
  out.array() += lambda * (x.array().log() + 1.0);
  return out;
}

}  // namespace routedesign

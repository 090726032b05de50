#pragma once

#include <functional>
#include <vector>

#include "routedesign/smooth_eq.hpp"

namespace routedesign {

// Smooth performance function psi over joint flows.
struct DesignObjective {
  std::function<double(const FlowProfile&)> evaluate;
  std::function<Vector(const FlowProfile&)> gradient;
  int dim = 0;
};

// psi(x) = 1/2 ||x - target||^2.
DesignObjective tracking_objective(const FlowProfile& target);

// d psi / d b and d psi / d C. The C gradient is rank one, grad_b * x^T, and is
// stored in factored form; grad_C() expands it.
struct GradientPair {
  Vector grad_b;
  FlowProfile x;

  Matrix grad_C() const { return grad_b * x.transpose(); }
};

enum class GradientMode { exact, pseudoinverse };

struct GradientOptions {
  GradientMode mode = GradientMode::pseudoinverse;
  numerics::ToleranceConfig tol;
  // exact mode refuses Jacobians whose condition number exceeds this.
  double condition_cap = 1e12;
};

// diag(exp((E^T v - b - C x) / lambda - 1)) at the solution.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> matrix_D(const AtomicRoutingGame& game,
                                                       const EquilibriumSolution& sol);

// Implicit-function gradients of psi(x(b, C)):
//   grad_b = -(1/lambda) [D 0] K^T [grad_x psi; 0],  grad_C = grad_b x^T
// with K = J^{-1} (exact) or the pseudoinverse of J.
GradientPair implicit_gradients(const AtomicRoutingGame& game, const EquilibriumSolution& sol,
                                const DesignObjective& objective,
                                const GradientOptions& options = {});

// 0/1 joint flow from one link-index path per player. Throws BrokenPath when a
// path does not chain the player's origin to its destination.
FlowProfile path_to_target(const AtomicRoutingGame& game,
                           const std::vector<std::vector<LinkId>>& paths);

}  // namespace routedesign

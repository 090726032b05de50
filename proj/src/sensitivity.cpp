#include "routedesign/sensitivity.hpp"

#include <string>

#include "routedesign/errors.hpp"

namespace routedesign {

DesignObjective tracking_objective(const FlowProfile& target) {
  DesignObjective obj;
  obj.dim = static_cast<int>(target.size());
  obj.evaluate = [target](const FlowProfile& x) {
    if (x.size() != target.size()) throw ValidationError("objective: dimension mismatch");
    return 0.5 * (x - target).squaredNorm();
  };
  obj.gradient = [target](const FlowProfile& x) -> Vector {
    if (x.size() != target.size()) throw ValidationError("objective: dimension mismatch");
    return x - target;
  };
  return obj;
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> matrix_D(const AtomicRoutingGame& game,
                                                       const EquilibriumSolution& sol) {
  return smoothed_response(game, sol.x, sol.v, sol.lambda).asDiagonal();
}

GradientPair implicit_gradients(const AtomicRoutingGame& game, const EquilibriumSolution& sol,
                                const DesignObjective& objective, const GradientOptions& options) {
  const int nx = game.flow_dim();
  if (objective.dim != nx) throw ValidationError("objective dimension does not match the game");
  const Vector d = smoothed_response(game, sol.x, sol.v, sol.lambda);
  const Matrix j = jacobian_F(game, sol.x, sol.v, sol.lambda);

  Vector padded = Vector::Zero(j.rows());
  padded.head(nx) = objective.gradient(sol.x);

  Vector w;
  if (options.mode == GradientMode::exact) {
    const double cond = numerics::condition_number(j);
    if (!(cond <= options.condition_cap)) {
      throw SingularJacobian("Jacobian condition number " + std::to_string(cond) +
                             " exceeds cap");
    }
    w = j.transpose().partialPivLu().solve(padded);
  } else {
    w = numerics::pseudoinverse(j, options.tol).transpose() * padded;
  }

  GradientPair out;
  out.grad_b = -(d.array() * w.head(nx).array() / sol.lambda).matrix();
  out.x = sol.x;
  return out;
}

FlowProfile path_to_target(const AtomicRoutingGame& game,
                           const std::vector<std::vector<LinkId>>& paths) {
  if (static_cast<int>(paths.size()) != game.num_players()) {
    throw ValidationError("need exactly one path per player");
  }
  const DirectedGraph& g = game.graph();
  FlowProfile target = FlowProfile::Zero(game.flow_dim());
  for (int i = 0; i < game.num_players(); ++i) {
    const Player& pl = game.players()[i];
    NodeId at = pl.origin;
    for (LinkId j : paths[i]) {
      if (j < 0 || j >= g.num_links() || g.link(j).tail != at) {
        throw BrokenPath("path of player " + std::to_string(i) + " is not connected at link " +
                         std::to_string(j));
      }
      at = g.link(j).head;
      target(i * g.num_links() + j) = 1.0;
    }
    if (at != pl.destination) {
      throw BrokenPath("path of player " + std::to_string(i) + " does not end at its destination");
    }
  }
  return target;
}

}  // namespace routedesign

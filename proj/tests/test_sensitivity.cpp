#include <cmath>
#include <random>

#include "doctest.h"
#include "routedesign/errors.hpp"
#include "routedesign/scenarios.hpp"
#include "routedesign/sensitivity.hpp"
#include "test_support.hpp"

using namespace routedesign;

namespace {

SmoothEqSettings tight(double lambda) {
  SmoothEqSettings s;
  s.lambda = lambda;
  s.residual_tol = 1e-13;
  return s;
}

AtomicRoutingGame line_game(std::mt19937& rng) {
  const DirectedGraph g = grid_graph({3, 1});
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  CostParams c;
  c.b.resize(8);
  for (auto& x : c.b) x = u01(rng);
  c.C = testsupport::random_C_in_D(2, 4, 0.5, rng);
  return AtomicRoutingGame(g, {{0, 2}, {2, 0}}, c, 0.5);
}

// psi at the re-solved equilibrium, warm-started from `near`. Solved to
// near machine precision so the differences are not dominated by solver noise.
double psi_resolved(const AtomicRoutingGame& game, const DesignObjective& obj,
                    const EquilibriumSolution& near) {
  SmoothEqSettings settings = tight(near.lambda);
  settings.residual_tol = 1e-15;
  const EquilibriumSolution s = solve_nls(game, settings, WarmStart{near.x, near.v});
  REQUIRE(s.residual_norm <= 1e-13);
  return obj.evaluate(s.x);
}

}  // namespace

TEST_CASE("tracking objective") {
  const Vector target = Vector::LinSpaced(5, 0.0, 1.0);
  const DesignObjective obj = tracking_objective(target);
  CHECK(obj.dim == 5);
  CHECK(obj.evaluate(target) == 0.0);
  CHECK(obj.gradient(target).norm() == 0.0);
  Vector bumped = target;
  bumped(0) += 1.0;
  CHECK(obj.evaluate(bumped) == doctest::Approx(0.5));
  CHECK(obj.gradient(bumped) == Vector::Unit(5, 0));
  const Vector at = Vector::Random(5);
  auto f = [&](const Vector& x) { return Vector::Constant(1, obj.evaluate(x)); };
  const Matrix fd = testsupport::fd_jacobian(f, at, 1e-6);
  CHECK((fd.row(0).transpose() - obj.gradient(at)).norm() <= 1e-8 * obj.gradient(at).norm());
  CHECK_THROWS_AS(obj.evaluate(Vector::Zero(3)), ValidationError);
}

TEST_CASE("matrix D equals diag(x) at a solution") {
  const Scenario sc = make_scenario("two_player_3x3");
  const EquilibriumSolution sol = solve_nls(sc.game, tight(0.1));
  const auto d = matrix_D(sc.game, sol);
  CHECK((d.diagonal() - sol.x).norm() <= 10 * 1e-13);
  CHECK(d.diagonal().minCoeff() > 0.0);
  // the exponential term of the residual is x - F_x
  const Vector f = residual_F(sc.game, sol.x, sol.v, 0.1);
  CHECK((sol.x - f.head(sol.x.size()) - d.diagonal()).norm() <= 1e-14);
}

TEST_CASE("gradients vanish when the objective gradient does") {
  const Scenario sc = make_scenario("two_player_3x3");
  const EquilibriumSolution sol = solve_nls(sc.game, tight(0.1));
  const GradientPair g = implicit_gradients(sc.game, sol, tracking_objective(sol.x));
  CHECK(g.grad_b.norm() == 0.0);
  CHECK(g.grad_C().norm() == 0.0);
}

TEST_CASE("grad_b matches re-solve finite differences") {
  std::mt19937 rng(31);
  const double h = 1e-5;
  for (int trial = 0; trial < 3; ++trial) {
    const AtomicRoutingGame game = line_game(rng);
    const EquilibriumSolution sol = solve_nls(game, tight(0.1));
    REQUIRE(sol.converged);
    Vector target = Vector::Zero(8);
    target(trial) = 1.0;
    target(5) = 0.5;
    const DesignObjective obj = tracking_objective(target);
    const GradientPair g = implicit_gradients(game, sol, obj);
    for (int k = 0; k < 8; ++k) {
      CostParams hi = game.costs(), lo = game.costs();
      hi.b(k) += h;
      lo.b(k) -= h;
      const double fd =
          (psi_resolved(game.with_costs(hi), obj, sol) - psi_resolved(game.with_costs(lo), obj, sol)) /
          (2 * h);
      if (std::abs(fd) > 1e-6) CHECK(std::abs(g.grad_b(k) - fd) <= 1e-3 * std::abs(fd));
    }
    // grad_C through the solver for a few entries
    for (const auto [r, c] : {std::pair{0, 1}, std::pair{3, 6}, std::pair{7, 2}}) {
      CostParams hi = game.costs(), lo = game.costs();
      hi.C(r, c) += h;
      lo.C(r, c) -= h;
      const double fd =
          (psi_resolved(game.with_costs(hi), obj, sol) - psi_resolved(game.with_costs(lo), obj, sol)) /
          (2 * h);
      if (std::abs(fd) > 1e-6) CHECK(std::abs(g.grad_C()(r, c) - fd) <= 1e-3 * std::abs(fd));
    }
    const Matrix gc = g.grad_C();
    CHECK(gc == g.grad_b * sol.x.transpose());
    CHECK(numerics::numerical_rank(gc) <= 1);
  }
}

TEST_CASE("exact and pseudoinverse modes agree on well-conditioned Jacobians") {
  std::mt19937 rng(41);
  const AtomicRoutingGame game = line_game(rng);
  const EquilibriumSolution sol = solve_nls(game, tight(0.1));
  const DesignObjective obj = tracking_objective(Vector::Ones(8));
  REQUIRE(numerics::condition_number(jacobian_F(game, sol.x, sol.v, 0.1)) <= 1e8);
  GradientOptions exact;
  exact.mode = GradientMode::exact;
  const GradientPair a = implicit_gradients(game, sol, obj, exact);
  const GradientPair b = implicit_gradients(game, sol, obj);
  CHECK((a.grad_b - b.grad_b).norm() <= 1e-6 * b.grad_b.norm());

  exact.condition_cap = 1.0;
  CHECK_THROWS_AS(implicit_gradients(game, sol, obj, exact), SingularJacobian);
  CHECK_THROWS_AS(implicit_gradients(game, sol, tracking_objective(Vector::Ones(3))),
                  ValidationError);
}

TEST_CASE("path to target") {
  const AtomicRoutingGame pair(DirectedGraph(2, {{0, 1}, {1, 0}}), {{0, 1}},
                               CostParams{Vector::Zero(2), Matrix::Zero(2, 2), 2});
  const FlowProfile t = path_to_target(pair, {{0}});
  CHECK(t == Eigen::Vector2d(1.0, 0.0));

  const Scenario sc = make_scenario("two_player_3x3");
  const FlowProfile target = path_to_target(sc.game, sc.desired_paths);
  // the top route is four links long
  CHECK(sc.game.player_flow(target, 0).sum() == 4.0);
  CHECK((sc.game.stacked_incidence() * target - sc.game.s()).norm() == 0.0);
  const Vector r1 = od_vectors(sc.game.graph(), sc.game.players()[0].origin,
                               sc.game.players()[0].destination).r;
  CHECK(incidence_matrix(sc.game.graph()) * sc.game.player_flow(target, 0) == r1);

  auto broken = sc.desired_paths;
  broken[0].erase(broken[0].begin() + 1);
  CHECK_THROWS_AS(path_to_target(sc.game, broken), BrokenPath);
  broken = sc.desired_paths;
  broken[1].pop_back();
  CHECK_THROWS_AS(path_to_target(sc.game, broken), BrokenPath);
}

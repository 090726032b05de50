#include <cmath>
#include <random>

#include "doctest.h"
#include "routedesign/errors.hpp"
#include "routedesign/game.hpp"
#include "routedesign/smooth_eq.hpp"
#include "test_support.hpp"

using namespace routedesign;

namespace {

CostParams flat_costs(int p, int m, double b) {
  CostParams c;
  c.b = Vector::Constant(p * m, b);
  c.C = Matrix::Zero(p * m, p * m);
  c.block_size = m;
  return c;
}

AtomicRoutingGame single_link_game() {
  return AtomicRoutingGame(DirectedGraph(2, {{0, 1}}), {{0, 1}}, flat_costs(1, 1, 0.3));
}

}  // namespace

TEST_CASE("game construction validates its inputs") {
  const DirectedGraph g = grid_graph({1, 2});
  CHECK_THROWS_AS(AtomicRoutingGame(g, {{0, 0}}, flat_costs(1, 2, 0.1)), ValidationError);
  CHECK_THROWS_AS(AtomicRoutingGame(g, {{0, 2}}, flat_costs(1, 2, 0.1)), ValidationError);
  CHECK_THROWS_AS(AtomicRoutingGame(g, {}, flat_costs(1, 2, 0.1)), ValidationError);
  CHECK_THROWS_AS(AtomicRoutingGame(g, {{0, 1}, {1, 0}}, flat_costs(1, 2, 0.1)), ValidationError);
  CHECK_THROWS_AS(AtomicRoutingGame(g, {{0, 1}}, flat_costs(1, 2, 0.1), -1.0), ValidationError);

  const AtomicRoutingGame game(grid_graph({3, 3}), {{3, 5}, {5, 3}}, flat_costs(2, 24, 0.1));
  CHECK(game.flow_dim() == 48);
  CHECK(game.multiplier_dim() == 16);
  const Matrix& e = game.stacked_incidence();
  CHECK(e.block(0, 0, 8, 24) == reduced_incidence(game.graph(), 5));
  CHECK(e.block(8, 24, 8, 24) == reduced_incidence(game.graph(), 3));
  CHECK(e.block(0, 24, 8, 24).norm() == 0.0);
  CHECK(game.s().head(8) == od_vectors(game.graph(), 3, 5).s);
}

TEST_CASE("marginal cost") {
  std::mt19937 rng(1);
  const AtomicRoutingGame zero_c(grid_graph({1, 3}), {{0, 2}, {2, 0}}, flat_costs(2, 4, 0.7));
  const Vector x = Vector::Random(8);
  CHECK(marginal_cost(zero_c, x, 1) == Vector::Constant(4, 0.7));

  CostParams eye;
  eye.b = Vector::Zero(2);
  eye.C = Matrix::Identity(2, 2);
  const AtomicRoutingGame quad(grid_graph({1, 2}), {{0, 1}}, eye);
  CHECK(marginal_cost(quad, Vector::Ones(2), 0) == Vector::Ones(2));

  // finite differences of the player objective in the player's own block
  for (int trial = 0; trial < 5; ++trial) {
    const AtomicRoutingGame game = testsupport::random_game({2, 2}, 2, 0.8, rng);
    const Vector at = Vector::Random(game.flow_dim()).cwiseAbs();
    for (int i = 0; i < 2; ++i) {
      const int m = game.num_links();
      auto f = [&](const Vector& xi) {
        Vector full = at;
        full.segment(i * m, m) = xi;
        return Vector::Constant(1, player_objective(game, full, i));
      };
      const Matrix fd = testsupport::fd_jacobian(f, Vector(at.segment(i * m, m)), 1e-5);
      const Vector mc = marginal_cost(game, at, i);
      CHECK((fd.row(0).transpose() - mc).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, mc.norm()));
    }
  }
}

TEST_CASE("player objective") {
  const AtomicRoutingGame g1(grid_graph({3, 3}), {{0, 8}}, flat_costs(1, 24, 1.0));
  CHECK(player_objective(g1, Vector::Zero(24), 0) == 0.0);
  Vector path = Vector::Zero(24);
  for (LinkId j : links_along(g1.graph(), {0, 1, 2, 5, 8})) path(j) = 1.0;
  CHECK(player_objective(g1, path, 0) == doctest::Approx(4.0));

  std::mt19937 rng(2);
  CostParams c = flat_costs(2, 4, 0.5);
  const Matrix c12 = Matrix::Random(4, 4);
  c.C.block(0, 4, 4, 4) = c12;
  const AtomicRoutingGame g2(grid_graph({1, 3}), {{0, 2}, {2, 0}}, c);
  const AtomicRoutingGame g0(grid_graph({1, 3}), {{0, 2}, {2, 0}}, flat_costs(2, 4, 0.5));
  const Vector x = Vector::Random(8);
  const double shift = (c12 * x.tail(4)).dot(x.head(4));
  CHECK(player_objective(g2, x, 0) - player_objective(g0, x, 0) == doctest::Approx(shift));
  // player 2 does not see C_12
  CHECK(player_objective(g2, x, 1) == doctest::Approx(player_objective(g0, x, 1)));
}

TEST_CASE("kkt and piecewise-linear residuals") {
  const AtomicRoutingGame one = single_link_game();
  const Vector x = Vector::Ones(1);
  // v = b makes u = 0 on the single link
  const Vector v = Vector::Constant(1, 0.3);
  CHECK(kkt_residual(one, x, {dual_slack(one, x, v), v}) <= 1e-15);
  CHECK(pwl_residual(one, x, v) <= 1e-15);

  const AtomicRoutingGame g(grid_graph({1, 3}), {{0, 2}}, flat_costs(1, 4, 1.0));
  Vector path = Vector::Zero(4);
  for (LinkId j : links_along(g.graph(), {0, 1, 2})) path(j) = 1.0;
  const KKTCertificate cert = potential_certificate(g, path);
  CHECK(kkt_residual(g, path, cert) <= 1e-12);
  CHECK(pwl_residual(g, path, cert.v) <= 1e-12);
  Vector bumped = path;
  bumped(0) += 0.1;
  CHECK(kkt_residual(g, bumped, cert) >= 0.1);

  // v = 0, b > 0 on a feasible path flow
  const Vector zero_v = Vector::Zero(g.multiplier_dim());
  const double expected = (path - (path - g.costs().b).cwiseMax(0.0)).cwiseAbs().maxCoeff();
  CHECK(pwl_residual(g, path, zero_v) == doctest::Approx(expected));
  CHECK(expected > 0.0);
}

TEST_CASE("piecewise-linear and complementarity forms agree on random small games") {
  std::mt19937 rng(17);
  const GridSpec specs[] = {{1, 2}, {1, 3}, {2, 2}};
  int certified = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const AtomicRoutingGame game = testsupport::random_game(specs[trial % 3], 1 + trial % 2, 0.5, rng);
    const EquilibriumSolution approx = homotopy_solve(game, {1.0, 0.5, 1e-4}, {});
    const auto exact = testsupport::active_set_equilibrium(game, approx.x);
    REQUIRE(exact.has_value());
    ++certified;
    const double pwl = pwl_residual(game, exact->x, exact->v);
    const KKTCertificate cert{dual_slack(game, exact->x, exact->v), exact->v};
    const double kkt = kkt_residual(game, exact->x, cert);
    CHECK(pwl <= 1e-10);
    CHECK(kkt <= 1e-8);
    CHECK(nash_gap(game, exact->x) <= 1e-8);
  }
  CHECK(certified == 30);
}

TEST_CASE("nash gap") {
  CHECK(nash_gap(single_link_game(), Vector::Ones(1)) == doctest::Approx(0.0));

  const AtomicRoutingGame g(grid_graph({3, 3}), {{0, 8}}, flat_costs(1, 24, 1.0));
  Vector detour = Vector::Zero(24);
  for (LinkId j : links_along(g.graph(), {0, 3, 4, 1, 2, 5, 8})) detour(j) = 1.0;
  CHECK(nash_gap(g, detour) == doctest::Approx(2.0));
  const auto terms = nash_gap_terms(g, detour);
  CHECK(terms.size() == 1);

  Vector broken = detour;
  broken(0) += 0.5;
  CHECK_THROWS_AS(nash_gap(g, broken), Infeasible);

  std::mt19937 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const AtomicRoutingGame r = testsupport::random_game({2, 2}, 2, 0.5, rng);
    FlowProfile x(r.flow_dim());
    for (int i = 0; i < 2; ++i) {
      const Player& pl = r.players()[i];
      x.segment(i * r.num_links(), r.num_links()) =
          interior_flow(r.graph(), pl.origin, pl.destination, 0.05 * (trial + 1));
    }
    CHECK(nash_gap(r, x) >= -1e-12);
  }
}

TEST_CASE("zero gap gives a KKT certificate") {
  const AtomicRoutingGame g(grid_graph({3, 3}), {{3, 5}, {5, 3}}, flat_costs(2, 24, 0.1));
  const EquilibriumSolution sol = homotopy_solve(g, {}, {});
  const auto exact = testsupport::active_set_equilibrium(g, sol.x);
  REQUIRE(exact.has_value());
  CHECK(nash_gap(g, exact->x) <= 1e-12);
  CHECK(kkt_residual(g, exact->x, potential_certificate(g, exact->x)) <= 1e-10);
}

TEST_CASE("feasible flows leave the destination with unit flow") {
  const AtomicRoutingGame g(grid_graph({3, 3}), {{0, 8}, {6, 2}}, flat_costs(2, 24, 0.1));
  const FlowProfile x = interior_joint_flow(g, 0.2);
  for (int i = 0; i < 2; ++i) {
    const Vector flow = incidence_matrix(g.graph()) * g.player_flow(x, i);
    CHECK(flow(g.players()[i].destination) == doctest::Approx(-1.0));
    CHECK(flow(g.players()[i].origin) == doctest::Approx(1.0));
  }
}

TEST_CASE("opponent circulation only matters through C_ij") {
  const DirectedGraph graph = grid_graph({1, 3});
  CostParams c = flat_costs(2, 4, 0.2);
  c.C.block(0, 4, 4, 4) = Matrix::Identity(4, 4);
  const AtomicRoutingGame coupled(graph, {{0, 2}, {2, 0}}, c);
  const AtomicRoutingGame uncoupled(graph, {{0, 2}, {2, 0}}, flat_costs(2, 4, 0.2));
  FlowProfile x = interior_joint_flow(coupled, 0.1);
  FlowProfile y = x;
  const LinkId j = *graph.find_link(0, 1);
  y(4 + j) += 0.3;
  y(4 + *graph.reverse_link(j)) += 0.3;
  CHECK(player_objective(uncoupled, x, 0) == doctest::Approx(player_objective(uncoupled, y, 0)));
  CHECK(player_objective(coupled, x, 0) != doctest::Approx(player_objective(coupled, y, 0)));
}

TEST_CASE("membership in D") {
  CostParams c = flat_costs(2, 2, 0.1);
  CHECK(membership_D(c, 0.0, 1e-10));
  c.C = 2.0 * Matrix::Identity(4, 4);
  CHECK_FALSE(membership_D(c, 1.0, 1e-8));
  Matrix k = Matrix::Zero(4, 4);
  k(0, 1) = 0.3;
  k(1, 0) = -0.3;
  c.C = k;
  CHECK_FALSE(membership_D(c, 1.0, 1e-8));
  std::mt19937 rng(9);
  c.C = testsupport::random_C_in_D(2, 2, 0.4, rng);
  CHECK(membership_D(c, 0.4, 1e-8));
  CHECK_FALSE(membership_D(c, 0.3, 1e-8));
}

#include "routedesign/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "routedesign/errors.hpp"

namespace routedesign {

namespace {

void check_flow(const AtomicRoutingGame& game, const FlowProfile& x) {
  if (x.size() != game.flow_dim()) throw ValidationError("flow vector has wrong length");
}

void check_player(const AtomicRoutingGame& game, int i) {
  if (i < 0 || i >= game.num_players()) {
    throw ValidationError("player index " + std::to_string(i) + " out of range");
  }
}

}  // namespace

AtomicRoutingGame::AtomicRoutingGame(DirectedGraph graph, std::vector<Player> players,
                                     CostParams costs, double rho)
    : graph_(std::move(graph)), players_(std::move(players)), costs_(std::move(costs)), rho_(rho) {
  if (players_.empty()) throw ValidationError("game needs at least one player");
  if (!(rho_ >= 0.0)) throw ValidationError("rho must be nonnegative");
  const int n = graph_.num_nodes();
  const int m = graph_.num_links();
  const int p = num_players();
  if (costs_.block_size == 0) costs_.block_size = m;
  if (costs_.block_size != m) throw ValidationError("cost block size must equal link count");
  if (costs_.b.size() != p * m) throw ValidationError("b must have length p*m");
  if (costs_.C.rows() != p * m || costs_.C.cols() != p * m) {
    throw ValidationError("C must be (p*m) x (p*m)");
  }
  if (!costs_.b.allFinite() || !costs_.C.allFinite()) {
    throw ValidationError("cost parameters must be finite");
  }

  incidence_ = incidence_matrix(graph_);
  s_.resize(p * (n - 1));
  stacked_incidence_ = Matrix::Zero(p * (n - 1), p * m);
  for (int i = 0; i < p; ++i) {
    const Player& pl = players_[i];
    if (!graph_.contains(pl.origin) || !graph_.contains(pl.destination)) {
      throw ValidationError("player " + std::to_string(i) + " has a node out of range");
    }
    if (pl.origin == pl.destination) {
      throw ValidationError("player " + std::to_string(i) + " has origin == destination");
    }
    s_.segment(i * (n - 1), n - 1) = od_vectors(graph_, pl.origin, pl.destination).s;
    stacked_incidence_.block(i * (n - 1), i * m, n - 1, m) =
        reduced_incidence(graph_, pl.destination);
  }
}

AtomicRoutingGame AtomicRoutingGame::with_costs(CostParams costs) const {
  return AtomicRoutingGame(graph_, players_, std::move(costs), rho_);
}

Vector marginal_cost(const AtomicRoutingGame& game, const FlowProfile& x, int i) {
  check_flow(game, x);
  check_player(game, i);
  const int m = game.num_links();
  return game.costs().b_block(i) + game.costs().C.middleRows(i * m, m) * x;
}

double player_objective(const AtomicRoutingGame& game, const FlowProfile& x, int i) {
  check_flow(game, x);
  check_player(game, i);
  const auto& costs = game.costs();
  const int m = game.num_links();
  const Vector xi = game.player_flow(x, i);
  Vector link_cost = costs.b_block(i) + 0.5 * costs.C_block(i, i) * xi;
  for (int j = 0; j < game.num_players(); ++j) {
    if (j != i) link_cost += costs.C_block(i, j) * x.segment(j * m, m);
  }
  return link_cost.dot(xi);
}

double path_cost(const AtomicRoutingGame& game, const FlowProfile& x, int i,
                 const std::vector<LinkId>& path) {
  check_flow(game, x);
  check_player(game, i);
  FlowProfile swapped = x;
  auto xi = swapped.segment(i * game.num_links(), game.num_links());
  xi.setZero();
  for (LinkId j : path) xi(j) = 1.0;
  return player_objective(game, swapped, i);
}

Vector dual_slack(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v) {
  check_flow(game, x);
  if (v.size() != game.multiplier_dim()) throw ValidationError("multiplier vector has wrong length");
  return game.costs().b + game.costs().C * x - game.stacked_incidence().transpose() * v;
}

double conservation_violation(const AtomicRoutingGame& game, const FlowProfile& x) {
  check_flow(game, x);
  return (game.s() - game.stacked_incidence() * x).lpNorm<Eigen::Infinity>();
}

double kkt_residual(const AtomicRoutingGame& game, const FlowProfile& x,
                    const KKTCertificate& cert) {
  check_flow(game, x);
  if (cert.u.size() != game.flow_dim()) throw ValidationError("dual slack has wrong length");
  const double stationarity = (cert.u - dual_slack(game, x, cert.v)).lpNorm<Eigen::Infinity>();
  const double complementarity = std::abs(cert.u.dot(x));
  const double x_negative = std::max(0.0, -x.minCoeff());
  const double u_negative = std::max(0.0, -cert.u.minCoeff());
  return std::max({conservation_violation(game, x), stationarity, complementarity, x_negative,
                   u_negative});
}

double pwl_residual(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v) {
  const Vector u = dual_slack(game, x, v);
  const Vector projected = (x - u).cwiseMax(0.0);
  return std::max(conservation_violation(game, x), (x - projected).lpNorm<Eigen::Infinity>());
}

std::vector<double> nash_gap_terms(const AtomicRoutingGame& game, const FlowProfile& x,
                                   double feasibility_tol) {
  const double violation = conservation_violation(game, x);
  if (violation > feasibility_tol) {
    throw Infeasible("flow violates conservation by " + std::to_string(violation));
  }
  std::vector<double> terms;
  terms.reserve(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const Vector mc = marginal_cost(game, x, i);
    const Player& pl = game.players()[i];
    const ShortestPath best = shortest_path_cost(game.graph(), mc, pl.origin, pl.destination);
    terms.push_back(mc.dot(game.player_flow(x, i)) - best.cost);
  }
  return terms;
}

double nash_gap(const AtomicRoutingGame& game, const FlowProfile& x, double feasibility_tol) {
  double total = 0.0;
  for (double t : nash_gap_terms(game, x, feasibility_tol)) total += t;
  return total;
}

KKTCertificate potential_certificate(const AtomicRoutingGame& game, const FlowProfile& x) {
  check_flow(game, x);
  const int n = game.graph().num_nodes();
  KKTCertificate cert;
  cert.v.resize(game.multiplier_dim());
  for (int i = 0; i < game.num_players(); ++i) {
    const Player& pl = game.players()[i];
    const Vector dist = distances_to(game.graph(), marginal_cost(game, x, i), pl.destination);
    if (!dist.allFinite()) throw Unreachable("destination not reachable from every node");
    Vector reduced(n - 1);
    reduced << dist.head(pl.destination), dist.tail(n - 1 - pl.destination);
    cert.v.segment(i * (n - 1), n - 1) = reduced;
  }
  cert.u = dual_slack(game, x, cert.v);
  return cert;
}

bool membership_D(const CostParams& costs, double rho, double tol) {
  const Matrix& c = costs.C;
  if (c.rows() != c.cols()) return false;
  if (c.norm() > rho + tol) return false;
  for (int i = 0; i < costs.num_blocks(); ++i) {
    const Matrix block = costs.C_block(i, i);
    if ((block - block.transpose()).norm() > tol) return false;
  }
  if (c.size() == 0) return true;
  const Matrix sym = c + c.transpose();
  return numerics::eig_sym(sym).values.minCoeff() >= -tol;
}

}  // namespace routedesign

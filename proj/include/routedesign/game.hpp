#pragma once

#include <vector>

#include "routedesign/graph.hpp"

namespace routedesign {

struct Player {
  NodeId origin = 0;
  NodeId destination = 0;

  friend bool operator==(const Player&, const Player&) = default;
};

// Nominal link costs b (length pm) and interaction matrix C (pm x pm),
// partitioned into m x m blocks C_ij.
struct CostParams {
  Vector b;
  Matrix C;
  int block_size = 0;  // m

  int num_blocks() const { return block_size > 0 ? static_cast<int>(b.size()) / block_size : 0; }

  auto b_block(int i) const { return b.segment(i * block_size, block_size); }
  auto C_block(int i, int j) const {
    return C.block(i * block_size, j * block_size, block_size, block_size);
  }

  friend bool operator==(const CostParams& a, const CostParams& b) {
    return a.block_size == b.block_size && a.b == b.b && a.C == b.C;
  }
};

// Joint flow x = [x_1; ...; x_p], each x_i of length m.
using FlowProfile = Vector;

struct KKTCertificate {
  Vector u;  // pm, dual slack
  Vector v;  // p(n-1), flow-conservation multipliers
};

class AtomicRoutingGame {
 public:
  // `rho` is the Frobenius radius of the designable set and is carried along
  // with the game for validation and serialization.
  AtomicRoutingGame(DirectedGraph graph, std::vector<Player> players, CostParams costs,
                    double rho = 0.0);

  const DirectedGraph& graph() const { return graph_; }
  const std::vector<Player>& players() const { return players_; }
  const CostParams& costs() const { return costs_; }
  double rho() const { return rho_; }

  int num_players() const { return static_cast<int>(players_.size()); }
  int num_links() const { return graph_.num_links(); }
  int flow_dim() const { return num_players() * num_links(); }
  int multiplier_dim() const { return num_players() * (graph_.num_nodes() - 1); }

  // Stacked reduced origin-destination vectors s.
  const Vector& s() const { return s_; }
  // Block-diagonal E_[1,p] = blkdiag(E_1, ..., E_p).
  const Matrix& stacked_incidence() const { return stacked_incidence_; }
  const Matrix& incidence() const { return incidence_; }

  auto player_flow(const FlowProfile& x, int i) const {
    return x.segment(i * num_links(), num_links());
  }

  AtomicRoutingGame with_costs(CostParams costs) const;

  friend bool operator==(const AtomicRoutingGame& a, const AtomicRoutingGame& b) {
    return a.graph_ == b.graph_ && a.players_ == b.players_ && a.costs_ == b.costs_ &&
           a.rho_ == b.rho_;
  }

 private:
  DirectedGraph graph_;
  std::vector<Player> players_;
  CostParams costs_;
  double rho_;
  Matrix incidence_;
  Vector s_;
  Matrix stacked_incidence_;
};

// Gradient of player i's objective w.r.t. x_i: b_i + sum_j C_ij x_j.
Vector marginal_cost(const AtomicRoutingGame& game, const FlowProfile& x, int i);

// (b_i + 1/2 C_ii x_i + sum_{j != i} C_ij x_j)^T x_i.
double player_objective(const AtomicRoutingGame& game, const FlowProfile& x, int i);

// Cost to player i of routing along `path` while the others keep their flows.
double path_cost(const AtomicRoutingGame& game, const FlowProfile& x, int i,
                 const std::vector<LinkId>& path);

// Max violation of the complementarity (KKT) equilibrium conditions; zero iff
// they hold exactly.
double kkt_residual(const AtomicRoutingGame& game, const FlowProfile& x,
                    const KKTCertificate& cert);

// Max violation of s = E x and x = max{0, x + E^T v - b - C x}.
double pwl_residual(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v);

// u := b + C x - E^T v.
Vector dual_slack(const AtomicRoutingGame& game, const FlowProfile& x, const Vector& v);

// ||E_[1,p] x - s||_inf.
double conservation_violation(const AtomicRoutingGame& game, const FlowProfile& x);

inline constexpr double kGapFeasibilityTol = 1e-6;

// Sum over players of mc_i^T x_i - min_{y in P_i} mc_i^T y. Nonnegative for
// feasible x, zero exactly at a Nash equilibrium. Throws Infeasible when
// conservation is violated beyond `feasibility_tol`.
double nash_gap(const AtomicRoutingGame& game, const FlowProfile& x,
                double feasibility_tol = kGapFeasibilityTol);

// Per-player gap terms, same contract as nash_gap.
std::vector<double> nash_gap_terms(const AtomicRoutingGame& game, const FlowProfile& x,
                                   double feasibility_tol = kGapFeasibilityTol);

// Multipliers from shortest-path potentials under the marginal costs at x
// (distance to each player's destination) and the matching dual slack.
KKTCertificate potential_certificate(const AtomicRoutingGame& game, const FlowProfile& x);

// C + C^T psd (to tol), ||C||_F <= rho + tol and symmetric diagonal blocks.
bool membership_D(const CostParams& costs, double rho, double tol);

}  // namespace routedesign

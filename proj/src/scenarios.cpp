#include "routedesign/scenarios.hpp"

#include <utility>

#include "routedesign/errors.hpp"

namespace routedesign {

namespace {

using Cell = std::pair<int, int>;  // (row, col), 0-based, row 0 at the top

std::vector<LinkId> cells_path(const DirectedGraph& g, const GridSpec& spec,
                               const std::vector<Cell>& cells) {
  std::vector<NodeId> nodes;
  for (const auto& [row, col] : cells) nodes.push_back(grid_node(spec, row, col));
  return links_along(g, nodes);
}

Scenario build(std::string name, GridSpec spec, const std::vector<std::pair<Cell, Cell>>& od,
               const std::vector<std::vector<Cell>>& desired, double delta, double rho) {
  DirectedGraph g = grid_graph(spec);
  std::vector<Player> players;
  for (const auto& [o, d] : od) {
    players.push_back({grid_node(spec, o.first, o.second), grid_node(spec, d.first, d.second)});
  }
  std::vector<std::vector<LinkId>> paths;
  for (const auto& cells : desired) paths.push_back(cells_path(g, spec, cells));
  const int dim = static_cast<int>(players.size()) * g.num_links();
  CostParams costs{Vector::Constant(dim, delta), Matrix::Zero(dim, dim), g.num_links()};
  AtomicRoutingGame game(std::move(g), std::move(players), std::move(costs), rho);
  return Scenario{std::move(name), spec, std::move(game), std::move(paths)};
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"two_player_3x3", "four_player_5x5"};
  return names;
}

Scenario make_scenario(const std::string& name, double delta, double rho) {
  if (name == "two_player_3x3") {
    // Player 1: middle-left -> middle-right over the top row.
    // Player 2: middle-right -> middle-left under the bottom row.
    return build(name, {3, 3}, {{{1, 0}, {1, 2}}, {{1, 2}, {1, 0}}},
                 {{{1, 0}, {0, 0}, {0, 1}, {0, 2}, {1, 2}},
                  {{1, 2}, {2, 2}, {2, 1}, {2, 0}, {1, 0}}},
                 delta, rho);
  }
  if (name == "four_player_5x5") {
    // Players 1/2 cross the middle row around the outer ring; players 3/4
    // cross the middle column around the inner ring.
    return build(name, {5, 5},
                 {{{2, 0}, {2, 4}}, {{2, 4}, {2, 0}}, {{1, 2}, {3, 2}}, {{3, 2}, {1, 2}}},
                 {{{2, 0}, {1, 0}, {0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 4}, {2, 4}},
                  {{2, 4}, {3, 4}, {4, 4}, {4, 3}, {4, 2}, {4, 1}, {4, 0}, {3, 0}, {2, 0}},
                  {{1, 2}, {1, 3}, {2, 3}, {3, 3}, {3, 2}},
                  {{3, 2}, {3, 1}, {2, 1}, {1, 1}, {1, 2}}},
                 delta, rho);
  }
  throw ValidationError("unknown scenario '" + name + "'");
}

}  // namespace routedesign

#pragma once

#include <string>
#include <vector>

#include "routedesign/game.hpp"

namespace routedesign {

// Grid-world games with their desired (post-design) paths. Players travel
// between opposite sides of the grid; the undesigned equilibrium routes them
// straight through the middle row or column.
struct Scenario {
  std::string name;
  GridSpec grid;
  AtomicRoutingGame game;
  std::vector<std::vector<LinkId>> desired_paths;
};

// `two_player_3x3` or `four_player_5x5`. Costs start at b = delta 1, C = 0.
Scenario make_scenario(const std::string& name, double delta = 0.1, double rho = 0.5);

const std::vector<std::string>& scenario_names();

}  // namespace routedesign

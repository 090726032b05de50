#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "routedesign/design.hpp"

namespace routedesign::io {

using nlohmann::json;

// Game JSON, 1-based node indices:
//   {"graph": {"n": int, "links": [[tail, head], ...]},
//    "players": [{"origin": int, "destination": int}, ...],
//    "b": [...], "C": [[...], ...], "rho": real}
// Missing "b", "C" or "rho" default to zero.
// An optional "desired_paths" array of 1-based node sequences is read by
// desired_paths_from_json.
json game_to_json(const AtomicRoutingGame& game);
AtomicRoutingGame game_from_json(const json& doc);

AtomicRoutingGame load_game(const std::string& path);
void save_game(const std::string& path, const AtomicRoutingGame& game,
               const std::vector<std::vector<LinkId>>& desired_paths = {});

// Desired paths from the "desired_paths" member as link-index lists; empty
// when the member is absent.
std::vector<std::vector<LinkId>> desired_paths_from_json(const json& doc, const DirectedGraph& g);

json equilibrium_to_json(const EquilibriumSolution& sol, double gap);
// Reads "x" (and "v" when present) back from an equilibrium document.
WarmStart equilibrium_from_json(const json& doc);

json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// Fixed-format number rendering shared by every CSV writer.
std::string format_number(double value);

// Header `iter,psi_bar,psi_lambda,db_norm,dC_norm,residual,gap`.
std::string trace_to_csv(const DesignTrace& trace);

struct SweepRow {
  double param = 0.0;
  double psi_final = 0.0;
};

// Header `param,psi_final`.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace routedesign::io

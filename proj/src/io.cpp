#include "routedesign/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "routedesign/errors.hpp"

namespace routedesign::io {

namespace {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vector vector_from_json(const json& doc, const char* what) {
  if (!doc.is_array()) throw ValidationError(std::string(what) + " must be an array");
  Vector v(doc.size());
  for (std::size_t k = 0; k < doc.size(); ++k) v(k) = doc[k].get<double>();
  return v;
}

NodeId node_from_json(const json& doc, int n) {
  const int one_based = doc.get<int>();
  if (one_based < 1 || one_based > n) {
    throw ValidationError("node index " + std::to_string(one_based) + " out of range 1.." +
                          std::to_string(n));
  }
  return one_based - 1;
}

}  // namespace

json game_to_json(const AtomicRoutingGame& game) {
  json links = json::array();
  for (const Link& l : game.graph().links()) links.push_back({l.tail + 1, l.head + 1});
  json players = json::array();
  for (const Player& p : game.players()) {
    players.push_back({{"origin", p.origin + 1}, {"destination", p.destination + 1}});
  }
  json c = json::array();
  const Matrix& cm = game.costs().C;
  for (Eigen::Index r = 0; r < cm.rows(); ++r) c.push_back(vector_to_json(cm.row(r).transpose()));
  return {{"graph", {{"n", game.graph().num_nodes()}, {"links", links}}},
          {"players", players},
          {"b", vector_to_json(game.costs().b)},
          {"C", c},
          {"rho", game.rho()}};
}

AtomicRoutingGame game_from_json(const json& doc) {
  try {
    const json& graph = doc.at("graph");
    const int n = graph.at("n").get<int>();
    if (n <= 0) throw ValidationError("graph.n must be positive");
    std::vector<Link> links;
    for (const json& l : graph.at("links")) {
      if (!l.is_array() || l.size() != 2) throw ValidationError("links must be [tail, head] pairs");
      links.push_back({node_from_json(l[0], n), node_from_json(l[1], n)});
    }
    DirectedGraph g(n, std::move(links));

    std::vector<Player> players;
    for (const json& p : doc.at("players")) {
      players.push_back({node_from_json(p.at("origin"), n), node_from_json(p.at("destination"), n)});
    }
    const int dim = static_cast<int>(players.size()) * g.num_links();

    CostParams costs;
    costs.block_size = g.num_links();
    costs.b = doc.contains("b") ? vector_from_json(doc.at("b"), "b") : Vector::Zero(dim);
    if (doc.contains("C")) {
      const json& c = doc.at("C");
      if (!c.is_array() || static_cast<int>(c.size()) != dim) {
        throw ValidationError("C must have p*m rows");
      }
      costs.C.resize(dim, dim);
      for (int r = 0; r < dim; ++r) {
        const Vector row = vector_from_json(c[r], "C row");
        if (row.size() != dim) throw ValidationError("C must have p*m columns");
        costs.C.row(r) = row.transpose();
      }
    } else {
      costs.C = Matrix::Zero(dim, dim);
    }
    const double rho = doc.value("rho", 0.0);
    return AtomicRoutingGame(std::move(g), std::move(players), std::move(costs), rho);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed game JSON: ") + e.what());
  }
}

std::vector<std::vector<LinkId>> desired_paths_from_json(const json& doc, const DirectedGraph& g) {
  std::vector<std::vector<LinkId>> out;
  if (!doc.contains("desired_paths")) return out;
  try {
    for (const json& seq : doc.at("desired_paths")) {
      std::vector<NodeId> nodes;
      for (const json& node : seq) nodes.push_back(node_from_json(node, g.num_nodes()));
      out.push_back(links_along(g, nodes));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed desired_paths: ") + e.what());
  }
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

AtomicRoutingGame load_game(const std::string& path) { return game_from_json(read_json(path)); }

void save_game(const std::string& path, const AtomicRoutingGame& game,
               const std::vector<std::vector<LinkId>>& desired_paths) {
  json doc = game_to_json(game);
  if (!desired_paths.empty()) {
    json paths = json::array();
    for (const auto& path_links : desired_paths) {
      json seq = json::array();
      if (!path_links.empty()) seq.push_back(game.graph().link(path_links.front()).tail + 1);
      for (LinkId j : path_links) seq.push_back(game.graph().link(j).head + 1);
      paths.push_back(seq);
    }
    doc["desired_paths"] = paths;
  }
  write_text(path, doc.dump(2) + "\n");
}

json equilibrium_to_json(const EquilibriumSolution& sol, double gap) {
  return {{"lambda", sol.lambda},         {"x", vector_to_json(sol.x)},
          {"v", vector_to_json(sol.v)},   {"residual", sol.residual_norm},
          {"gap", gap},                   {"iterations", sol.iterations},
          {"converged", sol.converged}};
}

WarmStart equilibrium_from_json(const json& doc) {
  try {
    WarmStart ws;
    ws.x = vector_from_json(doc.at("x"), "x");
    if (doc.contains("v")) ws.v = vector_from_json(doc.at("v"), "v");
    return ws;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed equilibrium JSON: ") + e.what());
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string trace_to_csv(const DesignTrace& trace) {
  std::ostringstream os;
  os << "iter,psi_bar,psi_lambda,db_norm,dC_norm,residual,gap\n";
  for (const TraceRow& r : trace.rows) {
    os << r.iter << ',' << format_number(r.psi_bar) << ',' << format_number(r.psi_lambda) << ','
       << format_number(r.db_norm) << ',' << format_number(r.dC_norm) << ','
       << format_number(r.residual) << ',' << format_number(r.gap) << '\n';
  }
  return os.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "param,psi_final\n";
  for (const SweepRow& r : rows) {
    os << format_number(r.param) << ',' << format_number(r.psi_final) << '\n';
  }
  return os.str();
}

}  // namespace routedesign::io

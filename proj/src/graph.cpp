#include "routedesign/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "routedesign/errors.hpp"

namespace routedesign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_tolerance(double value) { return 1e-12 * (1.0 + std::abs(value)); }

void check_node(const DirectedGraph& g, NodeId u, const char* what) {
  if (!g.contains(u)) {
    throw ValidationError(std::string(what) + " node " + std::to_string(u) + " out of range");
  }
}

void check_weights(const DirectedGraph& g, const LinkWeights& w) {
  if (w.size() != g.num_links()) throw ValidationError("link weight vector has wrong length");
  if (!w.allFinite()) throw ValidationError("link weights must be finite");
}

// Bellman-Ford distances from `source`, following links forward (or backward
// when `reversed`).
Vector bellman_ford(const DirectedGraph& g, const LinkWeights& w, NodeId source, bool reversed) {
  const int n = g.num_nodes();
  Vector dist = Vector::Constant(n, kInf);
  dist(source) = 0.0;
  const auto& links = g.links();
  auto relax_round = [&]() {
    bool changed = false;
    for (LinkId j = 0; j < g.num_links(); ++j) {
      const NodeId from = reversed ? links[j].head : links[j].tail;
      const NodeId to = reversed ? links[j].tail : links[j].head;
      if (dist(from) == kInf) continue;
      const double cand = dist(from) + w(j);
      if (cand < dist(to) - tie_tolerance(dist(to) == kInf ? cand : dist(to))) {
        dist(to) = cand;
        changed = true;
      }
    }
    return changed;
  };
  for (int round = 0; round < n - 1; ++round) {
    if (!relax_round()) return dist;
  }
  if (relax_round()) throw NegativeCycle("negative-weight cycle reachable from node " +
                                         std::to_string(source));
  return dist;
}

}  // namespace

DirectedGraph::DirectedGraph(int num_nodes, std::vector<Link> links)
    : num_nodes_(num_nodes), links_(std::move(links)) {
  if (num_nodes_ <= 0) throw ValidationError("graph needs at least one node");
  for (std::size_t j = 0; j < links_.size(); ++j) {
    const Link& l = links_[j];
    if (!contains(l.tail) || !contains(l.head)) {
      throw ValidationError("link " + std::to_string(j) + " has an endpoint out of range");
    }
    if (l.tail == l.head) throw ValidationError("self-loop at link " + std::to_string(j));
    if (j > 0 && !(links_[j - 1] < l)) {
      throw ValidationError("links must be strictly sorted by (tail, head); violated at link " +
                            std::to_string(j));
    }
  }
  out_.assign(num_nodes_, {});
  in_.assign(num_nodes_, {});
  for (LinkId j = 0; j < num_links(); ++j) {
    out_[links_[j].tail].push_back(j);
    in_[links_[j].head].push_back(j);
  }
}

std::optional<LinkId> DirectedGraph::find_link(NodeId tail, NodeId head) const {
  const Link key{tail, head};
  auto it = std::lower_bound(links_.begin(), links_.end(), key);
  if (it == links_.end() || *it != key) return std::nullopt;
  return static_cast<LinkId>(it - links_.begin());
}

std::optional<LinkId> DirectedGraph::reverse_link(LinkId j) const {
  const Link& l = links_.at(j);
  return find_link(l.head, l.tail);
}

Matrix incidence_matrix(const DirectedGraph& g) {
  Matrix e = Matrix::Zero(g.num_nodes(), g.num_links());
  for (LinkId j = 0; j < g.num_links(); ++j) {
    e(g.link(j).tail, j) = 1.0;
    e(g.link(j).head, j) = -1.0;
  }
  return e;
}

Matrix reduced_incidence(const DirectedGraph& g, NodeId dropped) {
  check_node(g, dropped, "dropped");
  const Matrix e = incidence_matrix(g);
  Matrix out(g.num_nodes() - 1, g.num_links());
  out.topRows(dropped) = e.topRows(dropped);
  out.bottomRows(g.num_nodes() - 1 - dropped) = e.bottomRows(g.num_nodes() - 1 - dropped);
  return out;
}

DirectedGraph grid_graph(const GridSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0 || spec.width * spec.height < 2) {
    throw ValidationError("grid needs positive dimensions and at least two cells");
  }
  std::vector<Link> links;
  for (int row = 0; row < spec.height; ++row) {
    for (int col = 0; col < spec.width; ++col) {
      const NodeId u = grid_node(spec, row, col);
      if (row > 0) links.push_back({u, grid_node(spec, row - 1, col)});
      if (col > 0) links.push_back({u, grid_node(spec, row, col - 1)});
      if (col + 1 < spec.width) links.push_back({u, grid_node(spec, row, col + 1)});
      if (row + 1 < spec.height) links.push_back({u, grid_node(spec, row + 1, col)});
    }
  }
  std::sort(links.begin(), links.end());
  return DirectedGraph(spec.width * spec.height, std::move(links));
}

OdVectors od_vectors(const DirectedGraph& g, NodeId origin, NodeId destination) {
  check_node(g, origin, "origin");
  check_node(g, destination, "destination");
  if (origin == destination) throw ValidationError("origin and destination must differ");
  OdVectors od;
  od.r = Vector::Zero(g.num_nodes());
  od.r(origin) = 1.0;
  od.r(destination) = -1.0;
  od.s.resize(g.num_nodes() - 1);
  od.s << od.r.head(destination), od.r.tail(g.num_nodes() - 1 - destination);
  return od;
}

ShortestPath shortest_path_cost(const DirectedGraph& g, const LinkWeights& w, NodeId origin,
                                NodeId destination) {
  check_node(g, origin, "origin");
  check_node(g, destination, "destination");
  if (origin == destination) throw ValidationError("origin and destination must differ");
  check_weights(g, w);

  const Vector dist = bellman_ford(g, w, origin, false);
  if (dist(destination) == kInf) {
    throw Unreachable("no path from node " + std::to_string(origin) + " to node " +
                      std::to_string(destination));
  }

  // Hop counts over the subgraph of tight links; predecessors must sit one
  // hop closer to the origin, so the predecessor graph is acyclic even when
  // zero-cost cycles exist.
  auto tight = [&](LinkId j) {
    const Link& l = g.link(j);
    if (dist(l.tail) == kInf) return false;
    return std::abs(dist(l.tail) + w(j) - dist(l.head)) <= tie_tolerance(dist(l.head)) * 1e3;
  };
  std::vector<int> hops(g.num_nodes(), -1);
  std::vector<NodeId> frontier{origin};
  hops[origin] = 0;
  while (!frontier.empty() && hops[destination] < 0) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (LinkId j : g.out_links(u)) {
        const NodeId h = g.link(j).head;
        if (hops[h] < 0 && tight(j)) {
          hops[h] = hops[u] + 1;
          next.push_back(h);
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  if (hops[destination] < 0) throw NumericalError("shortest path reconstruction failed");

  ShortestPath sp;
  sp.flow = Vector::Zero(g.num_links());
  for (NodeId u = destination; u != origin;) {
    LinkId best = -1;
    for (LinkId j : g.in_links(u)) {
      const NodeId t = g.link(j).tail;
      if (hops[t] == hops[u] - 1 && tight(j) && (best < 0 || t < g.link(best).tail)) best = j;
    }
    sp.links.push_back(best);
    u = g.link(best).tail;
  }
  std::reverse(sp.links.begin(), sp.links.end());
  for (LinkId j : sp.links) {
    sp.flow(j) = 1.0;
    sp.cost += w(j);
  }
  return sp;
}

Vector distances_to(const DirectedGraph& g, const LinkWeights& w, NodeId destination) {
  check_node(g, destination, "destination");
  check_weights(g, w);
  return bellman_ford(g, w, destination, true);
}

Vector interior_flow(const DirectedGraph& g, NodeId origin, NodeId destination, double eps) {
  if (!(eps > 0.0)) throw ValidationError("interior_flow: eps must be positive");
  const ShortestPath path =
      shortest_path_cost(g, LinkWeights::Ones(g.num_links()), origin, destination);
  Vector y = path.flow;
  for (LinkId j = 0; j < g.num_links(); ++j) {
    if (!g.reverse_link(j)) {
      throw ValidationError("interior_flow: link " + std::to_string(j) + " has no reverse partner");
    }
    y(j) += eps;
  }
  return y;
}

bool graph_rank_check(const DirectedGraph& g) {
  if (g.num_links() == 0) return g.num_nodes() == 1;
  return numerics::numerical_rank(incidence_matrix(g)) == g.num_nodes() - 1;
}

std::vector<LinkId> links_along(const DirectedGraph& g, const std::vector<NodeId>& nodes) {
  std::vector<LinkId> out;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    auto j = g.find_link(nodes[k - 1], nodes[k]);
    if (!j) {
      throw BrokenPath("no link from node " + std::to_string(nodes[k - 1]) + " to node " +
                       std::to_string(nodes[k]));
    }
    out.push_back(*j);
  }
  return out;
}

}  // namespace routedesign

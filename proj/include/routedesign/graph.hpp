#pragma once

#include <optional>
#include <vector>

#include "routedesign/numerics.hpp"

namespace routedesign {

// Nodes are 0-based internally; file formats use 1-based indices.
using NodeId = int;
using LinkId = int;

struct Link {
  NodeId tail = 0;
  NodeId head = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

// Directed graph without self-loops or parallel links. Links are kept in
// lexicographic (tail, head) order so link indices are reproducible.
class DirectedGraph {
 public:
  DirectedGraph(int num_nodes, std::vector<Link> links);

  int num_nodes() const { return num_nodes_; }
  int num_links() const { return static_cast<int>(links_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId j) const { return links_.at(j); }

  std::optional<LinkId> find_link(NodeId tail, NodeId head) const;
  std::optional<LinkId> reverse_link(LinkId j) const;

  const std::vector<LinkId>& out_links(NodeId u) const { return out_.at(u); }
  const std::vector<LinkId>& in_links(NodeId u) const { return in_.at(u); }

  bool contains(NodeId u) const { return u >= 0 && u < num_nodes_; }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.links_ == b.links_;
  }

 private:
  int num_nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
};

struct GridSpec {
  int width = 0;
  int height = 0;
};

// Cost per link, indexed like DirectedGraph::links().
using LinkWeights = Vector;

// n x m node-link incidence: +1 at the tail, -1 at the head.
Matrix incidence_matrix(const DirectedGraph& g);

// Incidence matrix with the row of node `dropped` removed.
Matrix reduced_incidence(const DirectedGraph& g, NodeId dropped);

// One node per cell in row-major order, links in both directions between
// 4-neighbours.
DirectedGraph grid_graph(const GridSpec& spec);

inline NodeId grid_node(const GridSpec& spec, int row, int col) { return row * spec.width + col; }

struct OdVectors {
  Vector r;  // length n: +1 at the origin, -1 at the destination
  Vector s;  // r without the destination entry
};

OdVectors od_vectors(const DirectedGraph& g, NodeId origin, NodeId destination);

struct ShortestPath {
  double cost = 0.0;
  Vector flow;                // 0/1 link indicator
  std::vector<LinkId> links;  // in travel order
};

// Bellman-Ford from `origin`. Throws NegativeCycle if a negative cycle is
// reachable from the origin and Unreachable if no path exists. Among
// equal-cost paths the fewest-hop one is chosen, and within those each node
// takes the lowest-index predecessor.
ShortestPath shortest_path_cost(const DirectedGraph& g, const LinkWeights& w, NodeId origin,
                                NodeId destination);

// Shortest distance from every node to `destination` (infinity when
// unreachable). Throws NegativeCycle like shortest_path_cost.
Vector distances_to(const DirectedGraph& g, const LinkWeights& w, NodeId destination);

// Unit origin->destination path flow plus `eps` on every link that has a
// reverse partner. Strictly positive when every link is paired.
Vector interior_flow(const DirectedGraph& g, NodeId origin, NodeId destination, double eps = 0.1);

// rank(E) == n - 1.
bool graph_rank_check(const DirectedGraph& g);

// Link ids along a node sequence; throws BrokenPath if a hop is not a link.
std::vector<LinkId> links_along(const DirectedGraph& g, const std::vector<NodeId>& nodes);

}  // namespace routedesign

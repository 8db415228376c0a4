#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/chain.hpp"

namespace mixlab {

using RoleMap = std::map<std::string, std::vector<std::size_t>>;

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

// Simple undirected graph with labeled vertices and named vertex roles.
class GraphSpec {
 public:
  std::size_t add_vertex(std::string label);
  // Rejects loops and duplicate edges.
  void add_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const;

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }
  std::size_t max_degree() const;
  // Each edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  RoleMap roles;
  const std::vector<std::size_t>& role(const std::string& name) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t edges_ = 0;
};

struct WeightedEdge {
  std::size_t u;
  std::size_t v;
  double weight;
  std::size_t id;
};

// Conductance network; parallel edges are kept distinct and summed in the kernel.
struct WeightedMultigraph {
  std::vector<std::string> labels;
  std::vector<WeightedEdge> edges;
  RoleMap roles;

  std::size_t add_vertex(std::string label);
  void add_edge(std::size_t u, std::size_t v, double weight);
  Vector vertex_weights() const;
};

std::vector<std::size_t> bfs_distances(const GraphSpec& g, const std::vector<std::size_t>& sources);
bool is_connected(const GraphSpec& g);

// Keeps the flagged vertices; roles are translated and dropped where empty.
GraphSpec induced_subgraph(const GraphSpec& g, const std::vector<char>& keep,
                           std::vector<std::size_t>* old_to_new = nullptr);

// P(x,x) = 1/2, P(x,y) = 1/(2 deg x) for neighbors; π(x) = deg(x)/2|E|.
ChainSpec lazy_srw_chain(const GraphSpec& g);

// P(x,x) = h(x), P(x,y) = (1 − h(x)) w(x,y)/w(x).
ChainSpec conductance_chain(const WeightedMultigraph& g, const std::vector<double>& holding);

}  // namespace mixlab

#include "mixlab/graph.hpp"

#include <algorithm>
#include <deque>

#include "mixlab/error.hpp"

namespace mixlab {

std::size_t GraphSpec::add_vertex(std::string label) {
  labels_.push_back(std::move(label));
  adjacency_.emplace_back();
  return labels_.size() - 1;
}

bool GraphSpec::has_edge(std::size_t u, std::size_t v) const {
  const auto& a = adjacency_.at(u);
  return std::find(a.begin(), a.end(), v) != a.end();
}

void GraphSpec::add_edge(std::size_t u, std::size_t v) {
  if (u == v) throw InvalidArgument("loop at vertex " + labels_.at(u));
  if (u >= labels_.size() || v >= labels_.size()) throw InvalidArgument("edge endpoint out of range");
  if (has_edge(u, v)) throw InvalidArgument("duplicate edge " + labels_[u] + " -- " + labels_[v]);
  adjacency_[u].push_back(v);
  adjacency_[v].push_back(u);
  ++edges_;
}

std::size_t GraphSpec::max_degree() const {
  std::size_t d = 0;
  for (const auto& a : adjacency_) d = std::max(d, a.size());
  return d;
}

std::vector<std::pair<std::size_t, std::size_t>> GraphSpec::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edges_);
  for (std::size_t u = 0; u < adjacency_.size(); ++u) {
    auto sorted = adjacency_[u];
    std::sort(sorted.begin(), sorted.end());
    for (auto v : sorted) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

const std::vector<std::size_t>& GraphSpec::role(const std::string& name) const {
  auto it = roles.find(name);
  if (it == roles.end()) throw InvalidArgument("graph has no role '" + name + "'");
  return it->second;
}

std::size_t WeightedMultigraph::add_vertex(std::string label) {
  labels.push_back(std::move(label));
  return labels.size() - 1;
}

void WeightedMultigraph::add_edge(std::size_t u, std::size_t v, double weight) {
  if (!(weight > 0.0)) throw InvalidArgument("conductances must be positive");
  edges.push_back({u, v, weight, edges.size()});
}

Vector WeightedMultigraph::vertex_weights() const {
  Vector w = Vector::Zero(static_cast<Eigen::Index>(labels.size()));
  for (const auto& e : edges) {
    w[static_cast<Eigen::Index>(e.u)] += e.weight;
    w[static_cast<Eigen::Index>(e.v)] += e.weight;
  }
  return w;
}

std::vector<std::size_t> bfs_distances(const GraphSpec& g, const std::vector<std::size_t>& sources) {
  std::vector<std::size_t> dist(g.vertex_count(), kUnreachable);
  std::deque<std::size_t> queue;
  for (auto s : sources) {
    if (dist.at(s) != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : g.neighbors(v)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

bool is_connected(const GraphSpec& g) {
  if (g.vertex_count() == 0) return true;
  const auto d = bfs_distances(g, {0});
  return std::none_of(d.begin(), d.end(), [](auto x) { return x == kUnreachable; });
}

GraphSpec induced_subgraph(const GraphSpec& g, const std::vector<char>& keep, std::vector<std::size_t>* old_to_new) {
  std::vector<std::size_t> map(g.vertex_count(), kUnreachable);
  GraphSpec out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (keep.at(v)) map[v] = out.add_vertex(g.labels()[v]);
  }
  for (auto [u, v] : g.edges()) {
    if (keep[u] && keep[v]) out.add_edge(map[u], map[v]);
  }
  for (const auto& [name, members] : g.roles) {
    std::vector<std::size_t> kept;
    for (auto v : members) {
      if (map[v] != kUnreachable) kept.push_back(map[v]);
    }
    if (!kept.empty()) out.roles[name] = std::move(kept);
  }
  if (old_to_new) *old_to_new = std::move(map);
  return out;
}

ChainSpec lazy_srw_chain(const GraphSpec& g) {
  if (g.vertex_count() == 0) throw InvalidArgument("empty graph");
  if (!is_connected(g)) throw Disconnected("lazy random walk needs a connected graph");
  KernelBuilder kb(g.vertex_count());
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    const auto deg = g.degree(x);
    if (deg == 0) {
      kb.add(x, x, 1.0);
      continue;
    }
    kb.add(x, x, 0.5);
    for (auto y : g.neighbors(x)) kb.add(x, y, 0.5 / static_cast<double>(deg));
  }
  ChainOptions opts;
  opts.require_lazy = true;
  return build_chain(kb.build(), g.labels(), opts);
}

ChainSpec conductance_chain(const WeightedMultigraph& g, const std::vector<double>& holding) {
  if (holding.size() != g.labels.size()) throw DimensionMismatch("holding vector size");
  const Vector w = g.vertex_weights();
  KernelBuilder kb(g.labels.size());
  for (std::size_t x = 0; x < g.labels.size(); ++x) kb.add(x, x, holding[x]);
  for (const auto& e : g.edges) {
    kb.add(e.u, e.v, (1.0 - holding[e.u]) * e.weight / w[static_cast<Eigen::Index>(e.u)]);
    kb.add(e.v, e.u, (1.0 - holding[e.v]) * e.weight / w[static_cast<Eigen::Index>(e.v)]);
  }
  return build_chain(kb.build(), g.labels);
}

}  // namespace mixlab

#include "mixlab/constructions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "mixlab/error.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

namespace {

std::string idx(const std::string& base, long long i) { return base + std::to_string(i); }

void require_min(int value, int minimum, const char* what) {
  if (value < minimum) {
    throw InvalidArgument(std::string(what) + " must be at least " + std::to_string(minimum));
  }
}

ExampleChain finish(std::string id, WeightedMultigraph net, const std::vector<double>& holding) {
  ExampleChain ex{std::move(id), conductance_chain(net, holding), net.roles, std::move(net)};
  return ex;
}

ExampleChain finish_table(std::string id, const KernelBuilder& kb, std::vector<std::string> labels, RoleMap roles) {
  return ExampleChain{std::move(id), build_chain(kb.build(), std::move(labels)), std::move(roles), std::nullopt};
}

}  // namespace

std::size_t ExampleChain::state(const std::string& name) const {
  const auto& members = role(name);
  if (members.size() != 1) throw InvalidArgument("role '" + name + "' is not a single state");
  return members.front();
}

const std::vector<std::size_t>& ExampleChain::role(const std::string& name) const {
  auto it = roles.find(name);
  if (it == roles.end()) throw InvalidArgument("chain has no role '" + name + "'");
  return it->second;
}

std::size_t GraphChain::state(const std::string& name) const {
  const auto& members = graph.role(name);
  if (members.size() != 1) throw InvalidArgument("role '" + name + "' is not a single vertex");
  return members.front();
}

// ---------------------------------------------------------------------------
// Weighted examples. In the conductance builds an edge's weight is 2^{-k}
// where k is the distance of its far endpoint from the centre of mass, so every
// interior step goes toward the centre with conditional probability 2/3.

ExampleChain basic_segment_chain(int n) {
  require_min(n, 2, "n");
  WeightedMultigraph g;
  const auto z = g.add_vertex("z");
  std::vector<std::size_t> a{z}, b{z};
  for (int k = 1; k <= n; ++k) a.push_back(g.add_vertex(idx("a", k)));
  for (int k = 1; k <= n; ++k) b.push_back(g.add_vertex(idx("b", k)));
  for (int k = 1; k <= n; ++k) {
    g.add_edge(a[k], a[k - 1], std::ldexp(1.0, -k));
    g.add_edge(b[k], b[k - 1], std::ldexp(1.0, -k));
  }
  g.roles = {{"z", {z}}, {"a", {a[n]}}, {"b", {b[n]}},
             {"A", {a.begin() + 1, a.end()}}, {"B", {b.begin() + 1, b.end()}}};
  std::vector<double> hold(g.labels.size(), 0.5);
  return finish("basic", std::move(g), hold);
}

ExampleChain aldous_chain(int n) {
  require_min(n, 4, "n");
  const int h = (n + 1) / 2;  // branch length
  const int s = n - h;        // segment length from the branch point to b
  WeightedMultigraph g;
  std::vector<double> hold;
  auto vertex = [&](std::string label, double holding) {
    hold.push_back(holding);
    return g.add_vertex(std::move(label));
  };
  const auto z = vertex("z", 0.75);
  std::vector<std::size_t> slow{z}, fast{z};
  for (int i = 1; i < h; ++i) slow.push_back(vertex(idx("c", i), 0.75));
  for (int i = 1; i < h; ++i) fast.push_back(vertex(idx("d", i), 0.5));
  const auto branch = vertex("p", 0.75);
  slow.push_back(branch);
  fast.push_back(branch);
  std::vector<std::size_t> seg{branch};
  for (int j = 1; j <= s; ++j) seg.push_back(vertex(idx("s", j), 0.75));
  for (int i = 1; i <= h; ++i) {
    g.add_edge(slow[i], slow[i - 1], std::ldexp(1.0, -i));
    g.add_edge(fast[i], fast[i - 1], std::ldexp(1.0, -i));
  }
  for (int j = 1; j <= s; ++j) g.add_edge(seg[j], seg[j - 1], std::ldexp(1.0, -(h + j)));
  g.roles = {{"z", {z}}, {"b", {seg[s]}}, {"branch", {branch}}};
  return finish("aldous", std::move(g), hold);
}

ExampleChain example1(int n) {
  require_min(n, 2, "n");
  WeightedMultigraph g;
  const auto z = g.add_vertex("z");
  std::vector<std::size_t> a{z}, b{z};
  for (int k = 1; k <= n; ++k) a.push_back(g.add_vertex(idx("a", k)));
  for (int k = 1; k <= n; ++k) b.push_back(g.add_vertex(idx("b", k)));
  const double nm1 = n - 1.0;
  for (int k = 1; k <= n; ++k) {
    g.add_edge(a[k], a[k - 1], std::ldexp(1.0, -k));
    g.add_edge(b[k], b[k - 1], std::ldexp(1.0, -k));
  }
  // Long edges; the k = 1 edge runs parallel to {z, b_1}.
  for (int k = 1; k < n; ++k) g.add_edge(z, b[k], 3.0 * std::ldexp(1.0, -(k + 1)) / nm1);
  g.add_edge(z, b[n], std::ldexp(1.0, -n) / nm1);
  g.roles = {{"z", {z}}, {"a", {a[n]}}, {"b", {b[n]}},
             {"A", {a.begin() + 1, a.end()}}, {"B", {b.begin() + 1, b.end()}}};
  std::vector<double> hold(g.labels.size(), 0.5);
  return finish("1", std::move(g), hold);
}

ExampleChain example2(int n) {
  require_min(n, 2, "n");
  std::vector<std::string> labels{"z"};
  std::vector<std::size_t> a{0}, b{0}, c{0};
  for (int i = 1; i <= 2 * n; ++i) { a.push_back(labels.size()); labels.push_back(idx("a", i)); }
  for (int i = 1; i <= 2 * n; ++i) { b.push_back(labels.size()); labels.push_back(idx("b", i)); }
  for (int i = 1; i < n; ++i) { c.push_back(labels.size()); labels.push_back(idx("c", i)); }
  c.push_back(b[n]);  // c_n = b_n

  KernelBuilder kb(labels.size());
  const double twelfth = 1.0 / 12.0;
  kb.add(0, 0, 0.75);
  for (auto first : {a[1], b[1], c[1]}) kb.add(0, first, twelfth);
  for (auto* side : {&a, &b}) {
    const auto& s = *side;
    for (int i = 1; i <= 2 * n; ++i) {
      kb.add(s[i], s[i], 0.75);
      if (i == 2 * n) {
        kb.add(s[i], s[i - 1], 0.25);
      } else if (side == &b && i == n) {
        // Three exits from the junction, 1/12 each.
        kb.add(s[i], s[i - 1], twelfth);
        kb.add(s[i], s[i + 1], twelfth);
        kb.add(s[i], c[n - 1], twelfth);
      } else {
        kb.add(s[i], s[i - 1], 1.0 / 6.0);
        kb.add(s[i], s[i + 1], twelfth);
      }
    }
  }
  for (int i = 1; i < n; ++i) {
    kb.add(c[i], c[i], 0.5);
    kb.add(c[i], c[i - 1], 1.0 / 3.0);
    kb.add(c[i], c[i + 1], 1.0 / 6.0);
  }
  RoleMap roles{{"z", {0}}, {"a", {a[2 * n]}}, {"b", {b[2 * n]}}, {"junction", {b[n]}},
                {"A", {a.begin() + 1, a.end()}}};
  std::vector<std::size_t> rest(b.begin() + 1, b.end());
  rest.insert(rest.end(), c.begin() + 1, c.end() - 1);
  roles["BC"] = rest;
  return finish_table("2", kb, std::move(labels), std::move(roles));
}

ExampleChain example3(int n, int M) {
  require_min(n, 2, "n");
  require_min(M, 2, "M");
  const int len = M * n;
  std::vector<std::string> labels{"z", "z'"};
  const std::size_t z = 0, zp = 1;
  std::vector<std::size_t> a{zp}, b{zp}, c{z}, d{z};
  for (int i = 1; i <= len; ++i) { a.push_back(labels.size()); labels.push_back(idx("a", i)); }
  for (int i = 1; i <= len; ++i) { b.push_back(labels.size()); labels.push_back(idx("b", i)); }
  for (int j = 1; j < n; ++j) { c.push_back(labels.size()); labels.push_back(idx("c", j)); }
  for (int j = 1; j < n; ++j) { d.push_back(labels.size()); labels.push_back(idx("d", j)); }
  c.push_back(zp);
  d.push_back(zp);

  KernelBuilder kb(labels.size());
  kb.add(z, z, 0.5);
  kb.add(z, c[1], 0.25);
  kb.add(z, d[1], 0.25);
  kb.add(zp, zp, 0.5);
  kb.add(zp, c[n - 1], 1.0 / 6.0);
  kb.add(zp, d[n - 1], 1.0 / 6.0);
  kb.add(zp, a[1], 1.0 / 12.0);
  kb.add(zp, b[1], 1.0 / 12.0);
  for (const auto* side : {&a, &b}) {
    const auto& s = *side;
    for (int i = 1; i <= len; ++i) {
      kb.add(s[i], s[i], 0.5);
      if (i == len) {
        kb.add(s[i], s[i - 1], 0.5);
      } else {
        kb.add(s[i], s[i - 1], 1.0 / 3.0);
        kb.add(s[i], s[i + 1], 1.0 / 6.0);
      }
    }
  }
  for (int j = 1; j < n; ++j) {
    kb.add(c[j], c[j], 0.75);
    kb.add(c[j], c[j - 1], 1.0 / 6.0);
    kb.add(c[j], c[j + 1], 1.0 / 12.0);
    kb.add(d[j], d[j], 0.5);
    kb.add(d[j], d[j - 1], 1.0 / 3.0);
    kb.add(d[j], d[j + 1], 1.0 / 6.0);
  }
  RoleMap roles{{"z", {z}}, {"z'", {zp}}, {"a", {a[len]}}, {"b", {b[len]}},
                {"A", {a.begin() + 1, a.end()}}, {"B", {b.begin() + 1, b.end()}}};
  return finish_table("3", kb, std::move(labels), std::move(roles));
}

ExampleChain ratio_two_variant(int n) {
  require_min(n, 4, "n");
  const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12));
  const double slow_hold = 1.0 - 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  WeightedMultigraph g;
  std::vector<double> hold;
  auto vertex = [&](std::string label, double holding) {
    hold.push_back(holding);
    return g.add_vertex(std::move(label));
  };
  const auto z = vertex("z", 0.5);
  std::vector<std::size_t> slow{z}, fast{z};
  for (int j = 1; j < m; ++j) slow.push_back(vertex(idx("c", j), slow_hold));
  for (int j = 1; j < m; ++j) fast.push_back(vertex(idx("d", j), 0.5));
  const auto zp = vertex("z'", 0.5);
  slow.push_back(zp);
  fast.push_back(zp);
  std::vector<std::size_t> a{zp}, b{zp};
  for (int i = 1; i <= n; ++i) a.push_back(vertex(idx("a", i), 0.5));
  for (int i = 1; i <= n; ++i) b.push_back(vertex(idx("b", i), 0.5));
  for (int j = 1; j <= m; ++j) {
    g.add_edge(slow[j], slow[j - 1], std::ldexp(1.0, -j));
    g.add_edge(fast[j], fast[j - 1], std::ldexp(1.0, -j));
  }
  for (int i = 1; i <= n; ++i) {
    g.add_edge(a[i], a[i - 1], std::ldexp(1.0, -(m + i)));
    g.add_edge(b[i], b[i - 1], std::ldexp(1.0, -(m + i)));
  }
  g.roles = {{"z", {z}}, {"z'", {zp}}, {"a", {a[n]}}, {"b", {b[n]}}};
  return finish("ratio2", std::move(g), hold);
}

ExampleChain build_example_chain(const std::string& id, int n, int M) {
  if (id == "basic") return basic_segment_chain(n);
  if (id == "aldous") return aldous_chain(n);
  if (id == "1") return example1(n);
  if (id == "2") return example2(n);
  if (id == "3") return example3(n, M);
  if (id == "ratio2") return ratio_two_variant(n);
  throw InvalidArgument("unknown chain example '" + id + "'");
}

// ---------------------------------------------------------------------------
// Bounded-degree constructions.

namespace {

void require_even(int n) {
  if (n < 2 || n % 2 != 0) throw OddDepth("depth n must be even and at least 2, got " + std::to_string(n));
}

std::uint64_t pow2(int k) { return std::uint64_t{1} << k; }

void check_cap(std::size_t count, const GraphLimits& limits) {
  if (count > limits.vertex_cap) {
    throw SizeOverflow(std::to_string(count) + " vertices exceed the cap of " + std::to_string(limits.vertex_cap));
  }
}

void require_sane(int n, int L) {
  require_even(n);
  require_min(L, 1, "L");
  if (n > 16) throw SizeOverflow("depth " + std::to_string(n) + " is beyond any feasible size");
}

std::size_t h1_count(int n, int L) {
  return (pow2(n + 1) - 1) + static_cast<std::size_t>(L - 1) * (pow2(n / 2 + 1) - 2);
}
std::size_t h2_count(int n, int L) { return h1_count(n, L) + pow2(2 * n + 1) - pow2(n + 1); }
std::size_t t_new_count(int n) { return pow2(n) - 2 + pow2(n - 1); }

// Binary tree of depth n with the first n/2 generations of edges stretched
// into L-edge paths. Returns generations 0..n.
std::vector<std::vector<std::size_t>> grow_h1(GraphSpec& g, const std::string& side, const std::string& root_label,
                                              int n, int L) {
  std::vector<std::vector<std::size_t>> gens(n + 1);
  gens[0].push_back(g.add_vertex(root_label));
  for (int j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < gens[j].size(); ++i) {
      for (std::size_t child = 2 * i; child <= 2 * i + 1; ++child) {
        const auto v = g.add_vertex(side + "g" + std::to_string(j + 1) + "_" + std::to_string(child));
        std::size_t prev = gens[j][i];
        if (j < n / 2) {
          for (int k = 1; k < L; ++k) {
            const auto p = g.add_vertex(side + "p" + std::to_string(j + 1) + "_" + std::to_string(child) + "_" +
                                        std::to_string(k));
            g.add_edge(prev, p);
            prev = p;
          }
        }
        g.add_edge(prev, v);
        gens[j + 1].push_back(v);
      }
    }
  }
  return gens;
}

// Layers L_{n+1} .. L_{2n}. Vertex u^k_{i_1..i_m} of L_{n+m} sits at position
// (k−1)·4^m + code(i_1..i_m) and joins u^{2k−1} and u^{2k} of the layer above.
std::vector<std::vector<std::size_t>> grow_layers(GraphSpec& g, const std::string& side, int n,
                                                  const std::vector<std::size_t>& leaves,
                                                  const std::vector<std::size_t>* shared_last) {
  std::vector<std::vector<std::size_t>> layers;
  std::vector<std::size_t> prev = leaves;  // m = 0: index k−1
  for (int m = 1; m <= n; ++m) {
    const std::uint64_t ks = pow2(n - m);
    const std::uint64_t codes = std::uint64_t{1} << (2 * m);
    std::vector<std::size_t> cur(ks * codes);
    for (std::uint64_t k = 0; k < ks; ++k) {
      for (std::uint64_t code = 0; code < codes; ++code) {
        const auto pos = k * codes + code;
        if (m == n && shared_last) {
          cur[pos] = shared_last->at(pos);
        } else {
          std::string label = side + "L" + std::to_string(n + m) + "_" + std::to_string(k + 1) + "_";
          for (int digit = m - 1; digit >= 0; --digit) label += static_cast<char>('1' + ((code >> (2 * digit)) & 3U));
          cur[pos] = g.add_vertex(std::move(label));
        }
        const std::uint64_t parent_code = code >> 2;
        const std::uint64_t parent_codes = codes >> 2;
        g.add_edge(cur[pos], prev[(2 * k) * parent_codes + parent_code]);
        g.add_edge(cur[pos], prev[(2 * k + 1) * parent_codes + parent_code]);
      }
    }
    layers.push_back(cur);
    prev = std::move(cur);
  }
  return layers;
}

// Glues a copy of T_n (or T'_n) at `root`. by_depth[d] collects depth-d vertices;
// the merged leaves are returned (or taken from `shared_leaves`).
std::vector<std::size_t> glue_tree(GraphSpec& g, const std::string& tag, int n, std::size_t root, bool prime,
                                   std::vector<std::vector<std::size_t>>* by_depth,
                                   const std::vector<std::size_t>* shared_leaves) {
  std::vector<std::size_t> parent_layer{root};
  const std::uint64_t half = pow2(n - 1);
  for (int d = 1; d < n; ++d) {
    std::vector<std::size_t> layer(pow2(d));
    for (std::uint64_t i = 0; i < layer.size(); ++i) {
      layer[i] = g.add_vertex(tag + "_" + std::to_string(d) + "_" + std::to_string(i));
      g.add_edge(layer[i], parent_layer[i / 2]);
    }
    // Siblings below the two subtree roots; T'_n also links them in the second subtree.
    if (d >= 2) {
      const std::uint64_t first_subtree = pow2(d - 1);
      for (std::uint64_t i = 0; i < layer.size(); i += 2) {
        if (i < first_subtree || prime) g.add_edge(layer[i], layer[i + 1]);
      }
    }
    if (by_depth) (*by_depth)[d].insert((*by_depth)[d].end(), layer.begin(), layer.end());
    parent_layer = std::move(layer);
  }
  std::vector<std::size_t> leaves(half);
  for (std::uint64_t i = 0; i < half; ++i) {
    leaves[i] = shared_leaves ? shared_leaves->at(i) : g.add_vertex(tag + "_leaf_" + std::to_string(i));
    // Leaf i of the first subtree and leaf i of the second share a label.
    g.add_edge(leaves[i], parent_layer[i / 2]);
    g.add_edge(leaves[i], parent_layer[(i + half) / 2]);
  }
  if (by_depth) (*by_depth)[n].insert((*by_depth)[n].end(), leaves.begin(), leaves.end());
  return leaves;
}

struct Side {
  std::vector<std::vector<std::size_t>> layers;  // L_0 .. L_{2n} or .. L_{3n}
};

Side grow_side(GraphSpec& g, const std::string& side, const std::string& root_label, int n, int L, int tree_variant,
               const std::vector<std::size_t>* shared_l2n, const std::vector<std::size_t>* shared_l3n) {
  Side s;
  s.layers = grow_h1(g, side, root_label, n, L);
  auto step2 = grow_layers(g, side, n, s.layers[n], shared_l2n);
  for (auto& layer : step2) s.layers.push_back(std::move(layer));
  if (tree_variant == 0) return s;
  std::vector<std::vector<std::size_t>> by_depth(n + 1);
  const auto l2n = s.layers[2 * n];
  const std::uint64_t half = pow2(n - 1);
  for (std::size_t copy = 0; copy < l2n.size(); ++copy) {
    std::vector<std::size_t> slice;
    if (shared_l3n) slice.assign(shared_l3n->begin() + static_cast<std::ptrdiff_t>(copy * half),
                                 shared_l3n->begin() + static_cast<std::ptrdiff_t>((copy + 1) * half));
    glue_tree(g, side + "T" + std::to_string(copy), n, l2n[copy], tree_variant == 2, &by_depth,
              shared_l3n ? &slice : nullptr);
  }
  for (int d = 1; d <= n; ++d) s.layers.push_back(std::move(by_depth[d]));
  return s;
}

void add_expander(GraphSpec& g, const std::vector<std::size_t>& z, const ExpanderResult& f) {
  for (auto [u, v] : f.graph.edges()) g.add_edge(z[u], z[v]);
}

TreeBuild make_build(GraphSpec g, const Side& s) {
  TreeBuild t;
  t.root = s.layers[0][0];
  t.layers = s.layers;
  t.graph = std::move(g);
  return t;
}

}  // namespace

std::size_t h3_vertex_count(int n, int L) { return h2_count(n, L) + pow2(2 * n) * t_new_count(n); }
std::size_t example4_vertex_count(int n, int L) { return 2 * h3_vertex_count(n, L) - pow2(3 * n - 1); }
std::size_t example5_vertex_count(int n, int L) { return h3_vertex_count(n, L) + h2_count(n, L) - pow2(2 * n); }

TreeBuild build_H1(int n, int L, const GraphLimits& limits) {
  require_sane(n, L);
  check_cap(h1_count(n, L), limits);
  GraphSpec g;
  Side s;
  s.layers = grow_h1(g, "", "a", n, L);
  return make_build(std::move(g), s);
}

TreeBuild build_H2(int n, int L, const GraphLimits& limits) {
  require_sane(n, L);
  check_cap(h2_count(n, L), limits);
  GraphSpec g;
  const auto s = grow_side(g, "", "a", n, L, 0, nullptr, nullptr);
  return make_build(std::move(g), s);
}

TreeBuild build_Tn(int n, bool prime) {
  require_even(n);
  GraphSpec g;
  const auto root = g.add_vertex("root");
  std::vector<std::vector<std::size_t>> by_depth(n + 1);
  by_depth[0].push_back(root);
  glue_tree(g, "T", n, root, prime, &by_depth, nullptr);
  TreeBuild t;
  t.root = root;
  t.layers = std::move(by_depth);
  t.graph = std::move(g);
  return t;
}

TreeBuild build_H3(int n, int L, int variant, const GraphLimits& limits) {
  require_sane(n, L);
  if (variant != 1 && variant != 2) throw InvalidArgument("H3 variant must be 1 or 2");
  check_cap(h3_vertex_count(n, L), limits);
  GraphSpec g;
  const auto s = grow_side(g, "", "a", n, L, variant, nullptr, nullptr);
  return make_build(std::move(g), s);
}

ExpanderResult expander_3regular(std::size_t m, std::uint64_t seed, double gap_threshold, int max_attempts) {
  if (m < 4 || m % 2 != 0) throw InvalidArgument("expander needs an even vertex count >= 4");
  Rng rng = make_stream(seed, "expander/" + std::to_string(m));
  std::vector<std::size_t> perm(m);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    bool simple = true;
    for (int matching = 0; matching < 3 && simple; ++matching) {
      for (std::size_t i = 0; i < m; ++i) perm[i] = i;
      shuffle(perm, rng);
      for (std::size_t i = 0; i < m; i += 2) {
        const auto u = std::min(perm[i], perm[i + 1]);
        const auto v = std::max(perm[i], perm[i + 1]);
        if (!seen.insert(static_cast<std::uint64_t>(u) * m + v).second) {
          simple = false;
          break;
        }
        edges.emplace_back(u, v);
      }
    }
    if (!simple) continue;
    GraphSpec g;
    for (std::size_t v = 0; v < m; ++v) g.add_vertex(std::to_string(v));
    for (auto [u, v] : edges) g.add_edge(u, v);
    if (!is_connected(g)) continue;
    const auto ev = spectrum(lazy_srw_chain(g));
    const double gap = 1.0 - ev[1];
    if (gap >= gap_threshold) return ExpanderResult{std::move(g), gap, gap / 2.0, attempt};
  }
  throw ExpanderSearchExhausted("no 3-regular graph on " + std::to_string(m) + " vertices with lazy gap >= " +
                                std::to_string(gap_threshold) + " after " + std::to_string(max_attempts) +
                                " attempts");
}

TreeBuild build_H4(int n, int L, int variant, std::uint64_t seed, double gap_threshold, const GraphLimits& limits) {
  auto t = build_H3(n, L, variant, limits);
  const auto f = expander_3regular(t.layers[3 * n].size(), seed, gap_threshold);
  add_expander(t.graph, t.layers[3 * n], f);
  return t;
}

GraphChain graph_chain(std::string id, GraphSpec graph, int n, int L, std::uint64_t seed) {
  auto chain = lazy_srw_chain(graph);
  return GraphChain{std::move(id), std::move(graph), std::move(chain), n, L, seed, std::nullopt};
}

GraphChain example4(int n, int L, std::uint64_t seed, const GraphExampleOptions& options) {
  require_sane(n, L);
  check_cap(example4_vertex_count(n, L), options.limits);
  GraphSpec g;
  const auto left = grow_side(g, "a", "a", n, L, 2, nullptr, nullptr);
  const auto& z = left.layers[3 * n];
  const auto right = grow_side(g, "b", "b", n, L, 1, nullptr, &z);
  const auto f = expander_3regular(z.size(), seed, options.expander_gap);
  add_expander(g, z, f);
  g.roles = {{"a", {left.layers[0][0]}}, {"b", {right.layers[0][0]}}, {"Z", z},
             {"L2n_a", left.layers[2 * n]}, {"L2n_b", right.layers[2 * n]}};
  auto gc = graph_chain("4", std::move(g), n, L, seed);
  gc.expander_gap = f.gap;
  return gc;
}

GraphChain example5(int n, int L, std::uint64_t seed, const GraphExampleOptions& options) {
  require_sane(n, L);
  check_cap(example5_vertex_count(n, L), options.limits);
  GraphSpec g;
  const auto left = grow_side(g, "a", "a", n, L, 1, nullptr, nullptr);
  const auto& zp = left.layers[2 * n];
  const auto& z = left.layers[3 * n];
  const auto right = grow_side(g, "b", "b", n, L, 0, &zp, nullptr);
  const auto f = expander_3regular(z.size(), seed, options.expander_gap);
  add_expander(g, z, f);
  g.roles = {{"a", {left.layers[0][0]}}, {"b", {right.layers[0][0]}}, {"Z", z}, {"Z'", zp}};
  auto gc = graph_chain("5", std::move(g), n, L, seed);
  gc.expander_gap = f.gap;
  return gc;
}

GraphChain stretched_excision(const GraphChain& gc) {
  const std::size_t radius = static_cast<std::size_t>(gc.L) * static_cast<std::size_t>(gc.n) / 2 + 1;
  const auto da = bfs_distances(gc.graph, {gc.state("a")});
  const auto db = bfs_distances(gc.graph, {gc.state("b")});
  std::vector<char> keep(gc.graph.vertex_count(), 0);
  for (std::size_t v = 0; v < keep.size(); ++v) keep[v] = da[v] > radius && db[v] > radius;
  auto sub = induced_subgraph(gc.graph, keep);
  if (!is_connected(sub)) throw Disconnected("excised graph is disconnected");
  auto out = graph_chain(gc.id + "-excised", std::move(sub), gc.n, gc.L, gc.seed);
  out.expander_gap = gc.expander_gap;
  return out;
}

ProjectionMap bd_projection(const GraphChain& gc) {
  const std::size_t radius = static_cast<std::size_t>(gc.L + 3) * static_cast<std::size_t>(gc.n) / 2;
  const auto dist = bfs_distances(gc.graph, {gc.state("a"), gc.state("b")});
  std::vector<char> keep(gc.graph.vertex_count(), 0);
  for (std::size_t v = 0; v < keep.size(); ++v) keep[v] = dist[v] <= radius;
  std::vector<std::size_t> old_to_new;
  const auto ball = induced_subgraph(gc.graph, keep, &old_to_new);

  ProjectionMap pm{std::vector<std::size_t>(ball.vertex_count()), std::vector<std::size_t>(ball.vertex_count()),
                   ChainSpec{}, 0.0};
  for (std::size_t v = 0; v < old_to_new.size(); ++v) {
    if (old_to_new[v] != kUnreachable) {
      pm.vertex[old_to_new[v]] = v;
      pm.level[old_to_new[v]] = dist[v];
    }
  }
  const std::size_t levels = radius + 1;
  // Per level: probabilities of moving down, staying at the same level (including the holding), moving up.
  std::vector<std::array<double, 3>> lumped(levels);
  std::vector<char> seen(levels, 0);
  for (std::size_t v = 0; v < ball.vertex_count(); ++v) {
    const auto d = pm.level[v];
    std::array<double, 3> row{0.0, 0.5, 0.0};
    const double share = 0.5 / static_cast<double>(ball.degree(v));
    for (auto w : ball.neighbors(v)) {
      const auto dw = pm.level[w];
      if (dw + 1 == d) row[0] += share;
      else if (dw == d) row[1] += share;
      else if (dw == d + 1) row[2] += share;
      else throw NotLumpable("edge spans more than one distance level");
    }
    if (!seen[d]) {
      lumped[d] = row;
      seen[d] = 1;
    } else {
      for (int k = 0; k < 3; ++k) pm.lumping_residual = std::max(pm.lumping_residual, std::abs(row[k] - lumped[d][k]));
    }
  }
  if (pm.lumping_residual >= 1e-12) {
    throw NotLumpable("distance projection residual " + std::to_string(pm.lumping_residual));
  }
  KernelBuilder kb(levels);
  std::vector<std::string> labels;
  for (std::size_t d = 0; d < levels; ++d) {
    if (!seen[d]) throw NotLumpable("empty distance level " + std::to_string(d));
    labels.push_back("d" + std::to_string(d));
    if (d > 0) kb.add(d, d - 1, lumped[d][0]);
    kb.add(d, d, lumped[d][1]);
    if (d + 1 < levels) kb.add(d, d + 1, lumped[d][2]);
  }
  ChainOptions opts;
  opts.require_lazy = true;
  pm.chain = build_chain(kb.build(), std::move(labels), opts);
  return pm;
}

ChainSpec random_reversible_lazy(std::size_t states, Rng& rng, double edge_probability) {
  if (states < 2) throw InvalidArgument("random chains need at least two states");
  WeightedMultigraph g;
  for (std::size_t i = 0; i < states; ++i) g.add_vertex("s" + std::to_string(i));
  std::vector<std::vector<char>> linked(states, std::vector<char>(states, 0));
  for (std::size_t i = 1; i < states; ++i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    g.add_edge(i, j, uniform_real(rng, 0.1, 1.0));
    linked[i][j] = linked[j][i] = 1;
  }
  for (std::size_t i = 0; i < states; ++i) {
    for (std::size_t j = i + 1; j < states; ++j) {
      if (!linked[i][j] && uniform01(rng) < edge_probability) g.add_edge(i, j, uniform_real(rng, 0.1, 1.0));
    }
  }
  std::vector<double> hold(states);
  for (auto& h : hold) h = uniform_real(rng, 0.5, 0.8);
  return conductance_chain(g, hold);
}

ChainSpec random_lazy_birth_death(std::size_t states, Rng& rng) {
  if (states < 2) throw InvalidArgument("birth-and-death chains need at least two states");
  KernelBuilder kb(states);
  std::vector<std::string> labels;
  for (std::size_t x = 0; x < states; ++x) {
    labels.push_back(std::to_string(x));
    const double up = x + 1 < states ? uniform_real(rng, 0.15, 0.35) : 0.0;
    const double down = x > 0 ? uniform_real(rng, 0.05, 0.5 - std::max(up, 0.15)) : 0.0;
    kb.add(x, x, 1.0 - up - down);
    if (up > 0.0) kb.add(x, x + 1, up);
    if (down > 0.0) kb.add(x, x - 1, down);
  }
  ChainOptions opts;
  opts.require_lazy = true;
  return build_chain(kb.build(), std::move(labels), opts);
}

}  // namespace mixlab

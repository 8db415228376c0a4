#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixlab/chain.hpp"
#include "mixlab/graph.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

// A chain from the example catalogue together with its named states.
struct ExampleChain {
  std::string id;
  ChainSpec chain;
  RoleMap roles;
  std::optional<WeightedMultigraph> network;  // present when built from conductances

  std::size_t state(const std::string& role) const;  // single-vertex role
  const std::vector<std::size_t>& role(const std::string& name) const;
};

struct GraphChain {
  std::string id;
  GraphSpec graph;
  ChainSpec chain;
  int n = 0;
  int L = 0;
  std::uint64_t seed = 0;
  std::optional<double> expander_gap;  // lazy spectral gap achieved by the cap

  std::size_t state(const std::string& role) const;
  const std::vector<std::size_t>& role(const std::string& name) const { return graph.role(name); }
};

ExampleChain basic_segment_chain(int n);
ExampleChain aldous_chain(int n);
ExampleChain example1(int n);
ExampleChain example2(int n);
ExampleChain example3(int n, int M);
ExampleChain ratio_two_variant(int n);

// Building blocks of the bounded-degree constructions. Layers are listed in the
// deterministic construction order (left-to-right).
struct TreeBuild {
  GraphSpec graph;
  std::size_t root = 0;
  std::vector<std::vector<std::size_t>> layers;  // layers[j] = generation L_j (stretched paths excluded)
};

struct GraphLimits {
  std::size_t vertex_cap = 50'000;
};

TreeBuild build_H1(int n, int L, const GraphLimits& limits = {});
TreeBuild build_H2(int n, int L, const GraphLimits& limits = {});
// T_n (prime = false) or T'_n (prime = true); layers[d] = depth d, leaves merged.
TreeBuild build_Tn(int n, bool prime = false);
inline TreeBuild build_Tn_prime(int n) { return build_Tn(n, true); }
TreeBuild build_H3(int n, int L, int variant, const GraphLimits& limits = {});

struct ExpanderResult {
  GraphSpec graph;
  double gap = 0.0;  // 1 − λ2 of the lazy simple random walk
  double c = 0.0;    // certified Cheeger lower bound gap/2
  int attempts = 0;
};

ExpanderResult expander_3regular(std::size_t m, std::uint64_t seed, double gap_threshold = 0.05,
                                 int max_attempts = 100);

TreeBuild build_H4(int n, int L, int variant, std::uint64_t seed, double gap_threshold = 0.05,
                   const GraphLimits& limits = {});

struct GraphExampleOptions {
  // Random cubic graphs on thousands of vertices have lazy gap near
  // (1 − 2√2/3)/2 ≈ 0.029, so the cap threshold is set below that.
  double expander_gap = 0.02;
  GraphLimits limits;
};

GraphChain example4(int n, int L, std::uint64_t seed, const GraphExampleOptions& options = {});
GraphChain example5(int n, int L, std::uint64_t seed, const GraphExampleOptions& options = {});

// Vertex counts implied by the layered definitions, for caps and tests.
std::size_t h3_vertex_count(int n, int L);
std::size_t example4_vertex_count(int n, int L);
std::size_t example5_vertex_count(int n, int L);

GraphChain graph_chain(std::string id, GraphSpec graph, int n = 0, int L = 0, std::uint64_t seed = 0);

// Deletes every vertex within distance L·n/2 + 1 of a or b.
GraphChain stretched_excision(const GraphChain& gc);

struct ProjectionMap {
  std::vector<std::size_t> level;   // per vertex of the restricted graph: dist(v, {a,b})
  std::vector<std::size_t> vertex;  // restricted-graph vertex -> original vertex
  ChainSpec chain;                  // lumped birth-and-death chain, state d = distance d
  double lumping_residual = 0.0;
};

// Lumps the lazy walk on the ball of radius (L+3)n/2 around {a, b} by distance.
ProjectionMap bd_projection(const GraphChain& gc);

// Seeded test inputs.
ChainSpec random_reversible_lazy(std::size_t states, Rng& rng, double edge_probability = 0.3);
ChainSpec random_lazy_birth_death(std::size_t states, Rng& rng);

// Named catalogue entry used by the CLI: basic, aldous, 1, 2, 3, ratio2.
ExampleChain build_example_chain(const std::string& id, int n, int M = 10);

}  // namespace mixlab

#include <gtest/gtest.h>

#include <cmath>

#include "mixlab/constructions.hpp"
#include "mixlab/distance.hpp"
#include "mixlab/error.hpp"
#include "mixlab/hitting.hpp"
#include "mixlab/io.hpp"
#include "mixlab/large_deviation.hpp"
#include "mixlab/spectral.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

double mean_hitting(const ExampleChain& ex, const char* from) {
  const auto h = hitting_distribution(ex.chain, ex.state(from), {ex.state("z")});
  double m = 0.0;
  for (std::size_t t = 0; t < h.pmf.size(); ++t) m += t * h.pmf[t];
  return m;
}

std::size_t steps(double x) { return static_cast<std::size_t>(std::floor(x + 1e-9)); }

void expect_reversible_lazy(const ChainSpec& c) {
  const auto& pi = c.stationary();
  for (std::size_t x = 0; x < c.size(); ++x) {
    EXPECT_GE(c.entry(x, x), 0.5 - 1e-12);
    for (std::size_t y = x + 1; y < c.size(); ++y)
      EXPECT_NEAR(pi(x) * c.entry(x, y), pi(y) * c.entry(y, x), 1e-15);
  }
}

}  // namespace

// ------------------------------------------------------------ basic segment

TEST(BasicSegment, MixingAndSeparationTimes) {
  constexpr int n = 100;
  const auto ex = basic_segment_chain(n);
  EXPECT_EQ(ex.chain.size(), 2u * n + 1);
  expect_reversible_lazy(ex.chain);
  const auto curves = distance_curves(ex.chain, {Metric::tv(), Metric::separation()}, 20 * n);
  EXPECT_NEAR(mixing_time(curves[0], 0.25).steps / (6.0 * n), 1.0, 0.1);
  EXPECT_NEAR(mixing_time(curves[1], 0.25).steps / (12.0 * n), 1.0, 0.1);
  EXPECT_NEAR(mean_hitting(ex, "a") / (6.0 * n), 1.0, 0.05);
}

// ------------------------------------------------------------ Aldous

TEST(Aldous, TwoDrops) {
  constexpr int n = 120;
  const auto ex = aldous_chain(n);
  expect_reversible_lazy(ex.chain);
  const auto d = distance_curve(ex.chain, Metric::tv(), 13 * n);
  EXPECT_GE(d.at(8 * n), 0.9);
  const double mid = d.at(steps(10.5 * n));
  EXPECT_GE(mid, 0.3);
  EXPECT_LE(mid, 0.7);
  EXPECT_LE(d.at(13 * n), 0.1);
}

// ------------------------------------------------------------ Example 1

TEST(Example1, BranchToCentre) {
  for (int n : {5, 20, 100}) {
    const auto ex = example1(n);
    for (int i = 2; i <= n; ++i)
      EXPECT_NEAR(ex.chain.entry(ex.chain.index_of("b" + std::to_string(i)), ex.state("z")), 1.0 / (2 * n), 1e-12);
  }
}

// The published expression for P(z, a_1); compared as printed.
TEST(Example1, CentreToA1AsPublished) {
  for (int n : {5, 20, 100}) {
    const auto ex = example1(n);
    EXPECT_NEAR(ex.chain.entry(ex.state("z"), ex.chain.index_of("a1")),
                oracle::Example1Formulas{n}.z_to_a1_printed(), 1e-12)
        << "n=" << n;
  }
}

TEST(Example1, CentreToA1FromWeights) {
  for (int n : {5, 20, 100}) {
    const auto ex = example1(n);
    EXPECT_NEAR(ex.chain.entry(ex.state("z"), ex.chain.index_of("a1")),
                oracle::Example1Formulas{n}.z_to_a1_from_weights(), 1e-12);
  }
}

TEST(Example1, ParallelEdgesKeptDistinct) {
  const auto ex = example1(6);
  ASSERT_TRUE(ex.network.has_value());
  const auto z = ex.state("z"), b1 = ex.chain.index_of("b1");
  int parallel = 0;
  double w = 0.0;
  for (const auto& e : ex.network->edges)
    if ((e.u == z && e.v == b1) || (e.u == b1 && e.v == z)) {
      ++parallel;
      w += e.weight;
    }
  EXPECT_EQ(parallel, 2);
  EXPECT_NEAR(w, 0.5 + 3.0 / (4.0 * 5.0), 1e-15);
}

TEST(Example1, SeparationStaircase) {
  constexpr int n = 150;
  const auto ex = example1(n);
  const auto sep = distance_curve(ex.chain, Metric::separation(), 13 * n);
  EXPECT_NEAR(sep.at(5 * n), 1.0, 0.07);
  for (int s : {8, 10}) EXPECT_NEAR(sep.at(s * n), std::exp(-(s - 6) / 2.0), 0.07) << "s=" << s;
  EXPECT_NEAR(sep.at(13 * n), 0.0, 0.07);
}

// ------------------------------------------------------------ Example 2

// The junction bullet lists b_{n+1} twice; the third exit is b_{n-1}, which
// the figure and row sums require.
TEST(Example2, KernelMatchesBullets) {
  constexpr int n = 7;
  const auto ex = example2(n);
  const auto& c = ex.chain;
  auto at = [&](const std::string& x, const std::string& y) { return c.entry(c.index_of(x), c.index_of(y)); };
  auto s = [](char p, int i) { return i == 0 ? std::string("z") : std::string(1, p) + std::to_string(i); };
  for (std::size_t x = 0; x < c.size(); ++x) {
    const bool in_c = c.label(x)[0] == 'c';
    EXPECT_DOUBLE_EQ(c.entry(x, x), in_c ? 0.5 : 0.75);
  }
  EXPECT_DOUBLE_EQ(at(s('a', 2 * n), s('a', 2 * n - 1)), 0.25);
  EXPECT_DOUBLE_EQ(at(s('b', 2 * n), s('b', 2 * n - 1)), 0.25);
  for (int i = 1; i < 2 * n; ++i) {
    EXPECT_DOUBLE_EQ(2 * at(s('a', i), s('a', i + 1)), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(at(s('a', i), s('a', i - 1)), 1.0 / 6.0);
    if (i == n) continue;
    EXPECT_DOUBLE_EQ(2 * at(s('b', i), s('b', i + 1)), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(at(s('b', i), s('b', i - 1)), 1.0 / 6.0);
  }
  for (int i = 1; i <= n - 1; ++i) {
    const std::string next = i == n - 1 ? s('b', n) : s('c', i + 1);
    EXPECT_DOUBLE_EQ(2 * at(s('c', i), next), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(at(s('c', i), s('c', i - 1)), 1.0 / 3.0);
  }
  for (const auto& y : {s('b', n + 1), s('c', n - 1), s('b', n - 1)}) EXPECT_DOUBLE_EQ(at(s('b', n), y), 1.0 / 12.0);
  for (const auto& y : {s('a', 1), s('b', 1), s('c', 1)}) EXPECT_DOUBLE_EQ(at("z", y), 1.0 / 12.0);
  expect_reversible_lazy(c);
}

TEST(Example2, CentreMass) {
  const auto ex = example2(200);
  EXPECT_NEAR(ex.chain.stationary()(ex.state("z")), 2.0 / 7.0, 0.01);
}

TEST(Example2, HittingStaircaseFromB) {
  constexpr int n = 60;
  const auto ex = example2(n);
  HittingOptions o;
  o.horizon = 26 * n;
  const auto h = hitting_distribution(ex.chain, ex.state("b"), {ex.state("z")}, o);
  EXPECT_NEAR(h.survival(16 * n - 1), 1.0, 0.1);
  EXPECT_NEAR(h.survival(21 * n - 1), 0.5, 0.1);
  EXPECT_NEAR(h.survival(26 * n - 1), 0.0, 0.1);
}

TEST(Example2, SeparationPlateau) {
  constexpr int n = 60;
  const auto ex = example2(n);
  EXPECT_NEAR(distance_curve(ex.chain, Metric::separation(), 45 * n).at(45 * n), 0.5, 0.1);
}

// ------------------------------------------------------------ Example 3

// Read with the conventions c_n = d_n = z': the z' bullet's c_n/d_n are the
// neighbours c_{n-1}/d_{n-1}, and the branch bullets run over j in [n-1].
TEST(Example3, KernelMatchesBullets) {
  constexpr int n = 5, M = 3;
  const auto ex = example3(n, M);
  const auto& c = ex.chain;
  auto at = [&](const std::string& x, const std::string& y) { return c.entry(c.index_of(x), c.index_of(y)); };
  auto lab = [&](char p, int i) -> std::string {
    if (p == 'a' || p == 'b') return i == 0 ? "z'" : std::string(1, p) + std::to_string(i);
    if (i == 0) return "z";
    if (i == n) return "z'";
    return std::string(1, p) + std::to_string(i);
  };
  for (std::size_t x = 0; x < c.size(); ++x) EXPECT_DOUBLE_EQ(c.entry(x, x), c.label(x)[0] == 'c' ? 0.75 : 0.5);
  EXPECT_DOUBLE_EQ(at(lab('a', M * n), lab('a', M * n - 1)), 0.5);
  EXPECT_DOUBLE_EQ(at(lab('b', M * n), lab('b', M * n - 1)), 0.5);
  EXPECT_DOUBLE_EQ(at("z", "c1"), 0.25);
  EXPECT_DOUBLE_EQ(at("z", "d1"), 0.25);
  EXPECT_DOUBLE_EQ(at("z'", lab('c', n - 1)), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(at("z'", lab('d', n - 1)), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(2 * at("z'", "a1"), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(2 * at("z'", "b1"), 1.0 / 6.0);
  for (int i = 1; i < M * n; ++i)
    for (char p : {'a', 'b'}) {
      EXPECT_DOUBLE_EQ(at(lab(p, i), lab(p, i - 1)), 1.0 / 3.0);
      EXPECT_DOUBLE_EQ(at(lab(p, i), lab(p, i + 1)), 1.0 / 6.0);
    }
  for (int j = 1; j < n; ++j) {
    EXPECT_DOUBLE_EQ(at(lab('d', j), lab('d', j - 1)), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(2 * at(lab('c', j), lab('c', j - 1)), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(at(lab('d', j), lab('d', j + 1)), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(2 * at(lab('c', j), lab('c', j + 1)), 1.0 / 6.0);
  }
  expect_reversible_lazy(c);
}

TEST(Example3, StationaryLimits) {
  const auto ex = example3(12, 10);
  EXPECT_NEAR(ex.chain.stationary()(ex.state("z")), 2.0 / 11.0, 0.02);
  EXPECT_NEAR(std::ldexp(ex.chain.stationary()(ex.state("z'")), 12), 6.0 / 11.0, 0.05);
}

TEST(Example3, SymmetricHittingFromBothEnds) {
  const auto ex = example3(6, 4);
  const auto ha = hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")});
  const auto hb = hitting_distribution(ex.chain, ex.state("b"), {ex.state("z")});
  ASSERT_EQ(ha.pmf.size(), hb.pmf.size());
  for (std::size_t t = 0; t < ha.pmf.size(); ++t) ASSERT_NEAR(ha.pmf[t], hb.pmf[t], 1e-12);
}

// TV is non-increasing, so the staircase in s (time 6sn) reads 1, 1/2, 0.
TEST(Example3, TotalVariationStaircase) {
  constexpr int n = 10, M = 10;
  const auto ex = example3(n, M);
  const auto d = distance_curve(ex.chain, Metric::tv(), steps(6.0 * (M + 2.5) * n));
  EXPECT_NEAR(d.at(steps(6.0 * (M + 0.5) * n)), 1.0, 0.12);
  EXPECT_NEAR(d.at(steps(6.0 * (M + 1.5) * n)), 0.5, 0.12);
  EXPECT_NEAR(d.at(steps(6.0 * (M + 2.5) * n)), 0.0, 0.12);
}

TEST(Example3, TotalVariationPassesNearHalfBetweenTheDrops) {
  constexpr int n = 10, M = 10;
  const auto ex = example3(n, M);
  const auto d = distance_curve(ex.chain, Metric::tv(), steps(6.0 * (M + 2) * n));
  double closest = 1.0;
  for (std::size_t t = 6 * (M + 1) * n + 1; t < 6 * (M + 2) * n; ++t) closest = std::min(closest, std::abs(d.at(t) - 0.5));
  EXPECT_LE(closest, 0.12);
}

TEST(Example3, SeparationDropsAcrossSM) {
  constexpr int n = 10, M = 10;
  const auto sm = solve_sM(M);
  const auto ex = example3(n, M);
  const auto sep = distance_curve(ex.chain, Metric::separation(), steps((sm.s_M + 2) * n));
  EXPECT_GE(sep.at(steps((sm.s_M - 1) * n)), 0.9);
  EXPECT_LE(sep.at(steps((sm.s_M + 2) * n)), 0.2);
}

// ------------------------------------------------------------ ratio-two variant

TEST(RatioTwo, SeparationLateAndTvTwoPlateaus) {
  constexpr int n = 400;
  const auto ex = ratio_two_variant(n);
  expect_reversible_lazy(ex.chain);
  const auto curves = distance_curves(ex.chain, {Metric::tv(), Metric::separation()}, steps(11.5 * n));
  EXPECT_GE(curves[1].at(steps(11.5 * n)), 0.9);
  const auto t45 = mixing_time(curves[0], 0.45), t55 = mixing_time(curves[0], 0.55);
  ASSERT_TRUE(t45.reached && t55.reached);
  EXPECT_GE(static_cast<double>(t45.steps) / t55.steps, 1.5);
}

// ------------------------------------------------------------ graph building blocks

TEST(Trees, H1Leaves) {
  for (int n : {2, 4, 6}) {
    const auto t = build_H1(n, 2);
    EXPECT_EQ(t.layers[n].size(), std::size_t{1} << n);
    EXPECT_TRUE(is_connected(t.graph));
  }
}

TEST(Trees, H1StretchedDistances) {
  const int n = 4, L = 3;
  const auto t = build_H1(n, L);
  const auto dist = bfs_distances(t.graph, {t.root});
  for (auto v : t.layers[n / 2]) EXPECT_EQ(dist[v], static_cast<std::size_t>(L * n / 2));
  for (auto v : t.layers[n]) EXPECT_EQ(dist[v], static_cast<std::size_t>(L * n / 2 + n / 2));
}

TEST(Trees, H2LayerCount) {
  const auto t = build_H2(4, 2);
  EXPECT_EQ(t.layers[4 + 2].size(), 64u);  // 4^2 · 2^{4−2}
  EXPECT_EQ(t.layers[8].size(), 256u);
  for (auto v : t.layers[8]) EXPECT_EQ(t.graph.degree(v), 2u);
}

TEST(Trees, TnStructure) {
  const auto t = build_Tn(4);
  const auto tp = build_Tn_prime(4);
  EXPECT_EQ(t.graph.vertex_count(), 23u);
  EXPECT_EQ(t.layers[4].size(), 8u);
  for (auto leaf : t.layers[4]) EXPECT_EQ(t.graph.degree(leaf), 2u);
  EXPECT_EQ(t.graph.edge_count(), 14u + 16u + 3u);
  EXPECT_EQ(tp.graph.edge_count(), 14u + 16u + 6u);
  EXPECT_LE(tp.graph.max_degree(), 4u);
  EXPECT_THROW(build_Tn(3), OddDepth);
}

TEST(Trees, VertexCountsMatchClosedForms) {
  for (int n : {2, 4}) {
    for (int L : {1, 2, 3}) {
      EXPECT_EQ(build_H3(n, L, 1).graph.vertex_count(), h3_vertex_count(n, L));
      EXPECT_EQ(build_H3(n, L, 2).graph.vertex_count(), h3_vertex_count(n, L));
      EXPECT_EQ(example4(n, L, 1).graph.vertex_count(), example4_vertex_count(n, L));
      EXPECT_EQ(example5(n, L, 1).graph.vertex_count(), example5_vertex_count(n, L));
    }
  }
  EXPECT_EQ(h3_vertex_count(4, 2), 6149u);
}

TEST(Trees, Guards) {
  EXPECT_THROW(build_H1(3, 2), OddDepth);
  EXPECT_THROW(example4(3, 2, 1), OddDepth);
  GraphLimits tiny;
  tiny.vertex_cap = 100;
  EXPECT_THROW(build_H3(4, 2, 1, tiny), SizeOverflow);
  GraphExampleOptions o;
  o.limits = tiny;
  EXPECT_THROW(example5(4, 2, 1, o), SizeOverflow);
}

TEST(Expander, K4IsTheOnlyCubicGraph) {
  const auto e = expander_3regular(4, 1);
  EXPECT_EQ(e.graph.edge_count(), 6u);
  EXPECT_NEAR(e.gap, 2.0 / 3.0, 1e-12);
}

TEST(Expander, Cubic64) {
  const auto e = expander_3regular(64, 1);
  EXPECT_GE(e.gap, 0.05);
  EXPECT_NEAR(e.c, e.gap / 2.0, 1e-15);
  for (std::size_t v = 0; v < 64; ++v) EXPECT_EQ(e.graph.degree(v), 3u);
  EXPECT_THROW(expander_3regular(7, 1), InvalidArgument);
  EXPECT_THROW(expander_3regular(64, 1, 0.99, 3), ExpanderSearchExhausted);
}

TEST(GraphExamples, DegreeBoundAndLazyKernel) {
  for (const auto& gc : {example4(4, 2, 1), example5(4, 2, 1)}) {
    EXPECT_LE(gc.graph.max_degree(), 7u) << gc.id;
    ASSERT_TRUE(gc.expander_gap.has_value());
    EXPECT_GE(*gc.expander_gap, 0.02);
    for (std::size_t v = 0; v < gc.chain.size(); v += 97) {
      EXPECT_DOUBLE_EQ(gc.chain.entry(v, v), 0.5);
      for (auto u : gc.graph.neighbors(v)) EXPECT_DOUBLE_EQ(gc.chain.entry(v, u), 0.5 / gc.graph.degree(v));
    }
  }
}

TEST(GraphExamples, SeededBuildsAreReproducible) {
  EXPECT_EQ(edge_list(example4(4, 2, 7).graph), edge_list(example4(4, 2, 7).graph));
  EXPECT_EQ(edge_list(example5(2, 2, 7).graph), edge_list(example5(2, 2, 7).graph));
  EXPECT_NE(edge_list(example4(4, 2, 7).graph), edge_list(example4(4, 2, 8).graph));
}

TEST(GraphExamples, Example5SymmetricHitting) {
  const auto gc = example5(2, 2, 1);
  const auto ha = hitting_distribution(gc.chain, gc.state("a"), gc.role("Z"));
  const auto hb = hitting_distribution(gc.chain, gc.state("b"), gc.role("Z"));
  for (std::size_t t = 0; t < std::min(ha.pmf.size(), hb.pmf.size()); ++t) ASSERT_NEAR(ha.pmf[t], hb.pmf[t], 1e-12);
}

TEST(Excision, Example4) {
  std::vector<double> kept;
  for (int n : {2, 4}) {
    const auto gc = example4(n, 2, 1);
    const auto hat = stretched_excision(gc);
    EXPECT_TRUE(is_connected(hat.graph));
    EXPECT_EQ(hat.graph.role("Z").size(), gc.role("Z").size());
    EXPECT_EQ(hat.graph.roles.count("a"), 0u);
    EXPECT_EQ(hat.graph.roles.count("b"), 0u);
    kept.push_back(static_cast<double>(hat.graph.vertex_count()) / gc.graph.vertex_count());
  }
  EXPECT_GT(kept[1], kept[0]);
  EXPECT_GT(cheeger_bounds(stretched_excision(example4(2, 2, 1)).chain).lower, 0.0);
}

TEST(Projection, Example5) {
  for (int n : {2, 4}) {
    const int L = 2;
    const auto pm = bd_projection(example5(n, L, 1));
    EXPECT_EQ(pm.chain.size(), static_cast<std::size_t>(1 + (L + 3) * n / 2));
    EXPECT_LT(pm.lumping_residual, 1e-12);
    EXPECT_TRUE(pm.chain.is_lazy());
    for (std::size_t x = 0; x < pm.chain.size(); ++x)
      for (std::size_t y = 0; y < pm.chain.size(); ++y)
        if (x > y + 1 || y > x + 1) EXPECT_EQ(pm.chain.entry(x, y), 0.0);
  }
}

TEST(LazySrw, SmallGraphs) {
  GraphSpec edge;
  edge.add_edge(edge.add_vertex("0"), edge.add_vertex("1"));
  const auto e = lazy_srw_chain(edge);
  EXPECT_DOUBLE_EQ(e.entry(0, 1), 0.5);
  GraphSpec tri;
  for (int i = 0; i < 3; ++i) tri.add_vertex(std::to_string(i));
  tri.add_edge(0, 1);
  tri.add_edge(1, 2);
  tri.add_edge(0, 2);
  const auto t = lazy_srw_chain(tri);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(t.stationary()(i), 1.0 / 3.0, 1e-15);
  GraphSpec split;
  split.add_vertex("0");
  split.add_vertex("1");
  EXPECT_THROW(lazy_srw_chain(split), Disconnected);
}

TEST(Catalogue, AllChainsValidate) {
  for (const char* id : {"basic", "aldous", "1", "2", "3", "ratio2"}) {
    const auto ex = build_example_chain(id, 8, 3);
    EXPECT_TRUE(ex.chain.is_lazy()) << id;
  }
  EXPECT_THROW(build_example_chain("9", 8), InvalidArgument);
}

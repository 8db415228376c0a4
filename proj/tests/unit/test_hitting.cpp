#include <gtest/gtest.h>

#include <cmath>

#include "mixlab/constructions.hpp"
#include "mixlab/error.hpp"
#include "mixlab/hitting.hpp"
#include "mixlab/spectral.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

ChainSpec lazy_pair() {
  Matrix k(2, 2);
  k << 0.5, 0.5, 0.5, 0.5;
  return build_chain(k);
}

HittingDistribution fixed(std::vector<double> pmf, std::vector<std::size_t> target = {0}) {
  HittingDistribution h;
  h.target = std::move(target);
  h.horizon = pmf.size() - 1;
  h.pmf = std::move(pmf);
  double s = 0.0;
  for (double p : h.pmf) s += p;
  h.residual = std::max(0.0, 1.0 - s);
  return h;
}

HittingDistribution geometric_half(std::size_t horizon) {
  std::vector<double> pmf(horizon + 1, 0.0);
  for (std::size_t t = 1; t <= horizon; ++t) pmf[t] = std::ldexp(1.0, -static_cast<int>(t));
  return fixed(pmf);
}

double mean_of(const std::vector<double>& pmf) {
  double m = 0.0;
  for (std::size_t t = 0; t < pmf.size(); ++t) m += t * pmf[t];
  return m;
}

}  // namespace

TEST(HittingPmf, SourceInTarget) {
  const auto ex = example1(5);
  const auto h = hitting_distribution(ex.chain, ex.state("z"), {ex.state("z")});
  ASSERT_GE(h.pmf.size(), 1u);
  EXPECT_DOUBLE_EQ(h.pmf[0], 1.0);
  EXPECT_DOUBLE_EQ(h.residual, 0.0);
}

TEST(HittingPmf, TwoStateIsGeometric) {
  const auto h = hitting_distribution(lazy_pair(), 0, {1});
  EXPECT_DOUBLE_EQ(h.pmf[0], 0.0);
  for (std::size_t t = 1; t < 30; ++t) EXPECT_NEAR(h.pmf[t], std::ldexp(1.0, -static_cast<int>(t)), 1e-16);
  EXPECT_LT(h.residual, 1e-12);
}

TEST(HittingPmf, Example1MeanFromFarEnd) {
  constexpr int n = 50;
  const auto ex = example1(n);
  const auto h = hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")});
  EXPECT_LT(h.residual, 1e-12);
  EXPECT_NEAR(mean_of(h.pmf) / (6.0 * n), 1.0, 0.05);
}

TEST(HittingPmf, MatchesKilledMatrixOracle) {
  const auto ex = example2(4);
  const auto p = oracle::dense_kernel(ex.chain);
  HittingOptions o;
  o.horizon = 300;
  const std::vector<std::size_t> target{ex.state("z"), ex.chain.index_of("c2")};
  for (std::size_t x = 0; x < ex.chain.size(); ++x) {
    const auto h = hitting_distribution(ex.chain, x, target, o);
    const auto ref = oracle::hitting_pmf(p, x, target, 300);
    for (std::size_t t = 0; t <= 300; ++t) ASSERT_NEAR(h.pmf[t], ref[t], 1e-14);
  }
}

TEST(HittingPmf, MassBalanceAndProfile) {
  const auto ex = example3(4, 3);
  HittingOptions o;
  o.record_profile = true;
  const std::vector<std::size_t> target{ex.state("z"), ex.chain.index_of("c2")};
  const auto r = hitting_pmf(ex.chain, ex.state("a"), target, o);
  double s = r.distribution.residual;
  for (double v : r.distribution.pmf) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  ASSERT_TRUE(r.profile.has_value());
  for (std::size_t t = 0; t < r.profile->rows.size(); ++t) {
    double row = 0.0;
    for (double v : r.profile->rows[t]) row += v;
    EXPECT_NEAR(row, r.distribution.pmf[t], 1e-12);
  }
}

TEST(HittingPmf, HorizonCapAndEmptyTarget) {
  const auto ex = example1(30);
  HittingOptions o;
  o.cap = 10;
  EXPECT_THROW(hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")}, o), HorizonCap);
  EXPECT_THROW(hitting_distribution(ex.chain, ex.state("a"), {}), EmptyTargetSet);
}

TEST(HittingPmf, LazyRatioFloor) {
  for (const auto& ex : {example1(20), example2(8), example3(5, 4)}) {
    for (const char* src : {"a", "b"}) {
      const auto h = hitting_distribution(ex.chain, ex.state(src), {ex.state("z")});
      for (std::size_t t = 0; t + 1 < h.pmf.size(); ++t)
        if (h.pmf[t] > 1e-12) EXPECT_GE(h.pmf[t + 1] / h.pmf[t], 0.5 - 1e-12);
    }
  }
}

TEST(Convolve, PointMassIsIdentity) {
  const auto g = geometric_half(40);
  const auto c = convolve(g, fixed({1.0}));
  for (std::size_t t = 0; t <= 40; ++t) EXPECT_DOUBLE_EQ(c.pmf[t], g.pmf[t]);
}

TEST(Convolve, GeometricPair) {
  const auto g = geometric_half(40);
  const auto c = convolve(g, g);
  EXPECT_DOUBLE_EQ(c.pmf[2], 0.25);
  EXPECT_DOUBLE_EQ(c.pmf[3], 2.0 / 8.0);  // (t−1)/2^t
}

TEST(Convolve, TargetMismatch) {
  EXPECT_THROW(convolve(fixed({0.5, 0.5}, {0}), fixed({0.5, 0.5}, {1})), TargetMismatch);
}

TEST(Convolve, CommutesBitForBit) {
  const auto ex = example1(12);
  const auto ha = hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")});
  const auto hb = hitting_distribution(ex.chain, ex.state("b"), {ex.state("z")});
  EXPECT_EQ(convolve(ha, hb).pmf, convolve(hb, ha).pmf);
}

TEST(Convolve, Example3MatchesDoubleSum) {
  const auto ex = example3(6, 10);
  const std::vector<std::size_t> zp{ex.state("z'")};
  const auto ha = hitting_distribution(ex.chain, ex.state("a"), zp);
  const auto hb = hitting_distribution(ex.chain, ex.state("b"), zp);
  const auto c = convolve(ha, hb);
  for (std::size_t t = 0; t < c.pmf.size(); t += 7) {
    double s = 0.0;
    for (std::size_t k = 0; k <= t; ++k)
      if (k < ha.pmf.size() && t - k < hb.pmf.size()) s += ha.pmf[k] * hb.pmf[t - k];
    ASSERT_NEAR(c.pmf[t], s, 1e-12);
  }
  // a and b play symmetric roles.
  for (std::size_t t = 0; t < ha.pmf.size(); ++t) ASSERT_NEAR(ha.pmf[t], hb.pmf[t], 1e-12);
}

TEST(Balanced, SingletonTarget) {
  const auto ex = example1(8);
  const auto r = balanced_check(ex.chain, ex.state("a"), {ex.state("z")});
  EXPECT_TRUE(r.balanced);
  EXPECT_DOUBLE_EQ(r.max_deviation, 0.0);
}

TEST(Balanced, Example4FromTheRootsButNotFromInside) {
  for (int n : {2, 4}) {
    const auto gc = example4(n, 2, 1);
    for (const char* side : {"a", "b"}) {
      const auto r = balanced_check(gc.chain, gc.state(side), gc.role("Z"));
      EXPECT_TRUE(r.balanced) << "n=" << n << " from " << side;
      EXPECT_LT(r.max_deviation, 1e-9);
    }
    const auto inner = gc.role("L2n_a").front();
    const auto r = balanced_check(gc.chain, inner, gc.role("Z"));
    EXPECT_FALSE(r.balanced);
    EXPECT_GT(r.max_deviation, 1e-3);
  }
}

TEST(Balanced, Example5PrimeSet) {
  for (int n : {2, 4}) {
    const auto gc = example5(n, 2, 1);
    for (const char* side : {"a", "b"})
      EXPECT_LT(balanced_check(gc.chain, gc.state(side), gc.role("Z'")).max_deviation, 1e-9);
  }
}

TEST(Dominance, SelfAndExample1) {
  constexpr int n = 50;
  const auto ex = example1(n);
  const auto ha = hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")});
  const auto hb = hitting_distribution(ex.chain, ex.state("b"), {ex.state("z")});
  const auto self = stochastic_dominance(ha, ha);
  EXPECT_TRUE(self.dominates);
  EXPECT_DOUBLE_EQ(self.max_violation, 0.0);
  EXPECT_TRUE(stochastic_dominance(ha, hb).dominates);
  const std::size_t horizon = std::max(ha.horizon, hb.horizon);
  for (std::size_t t = 0; t <= horizon; ++t) {
    const double cap = std::min(ha.survival(t), std::pow(1.0 - 1.0 / (2.0 * n), static_cast<double>(t)));
    ASSERT_LE(hb.survival(t), cap + 1e-12) << "t=" << t;
  }
}

TEST(Dominance, Example2FarEndIsSlowest) {
  const auto ex = example2(20);
  const std::vector<std::size_t> z{ex.state("z")};
  const auto ha = hitting_distribution(ex.chain, ex.state("a"), z);
  for (std::size_t x = 0; x < ex.chain.size(); ++x) {
    const auto hx = hitting_distribution(ex.chain, x, z);
    EXPECT_TRUE(stochastic_dominance(ha, hx).dominates) << ex.chain.label(x);
  }
}

TEST(PathsDecomposition, Example1IdentityThroughCentre) {
  constexpr int n = 30;
  const auto ex = example1(n);
  std::vector<std::size_t> grid;
  for (std::size_t t = 0; t <= 15 * n; t += 5) grid.push_back(t);
  const auto r = paths_decomposition_check(ex.chain, ex.state("a"), ex.state("b"), {ex.state("z")}, grid,
                                           *eigen_summary(ex.chain).t_rel);
  EXPECT_TRUE(r.every_path_meets_target);
  EXPECT_LE(r.max_identity_violation, 1e-9);
  EXPECT_GE(r.lower_bound_slack, -1e-9);
  EXPECT_GE(r.cdf_bound_slack, -1e-9);
  ASSERT_TRUE(r.upper_bound_slack.has_value());
  EXPECT_GE(*r.upper_bound_slack, -1e-9);
  EXPECT_DOUBLE_EQ(r.lhs.front(), 0.0);
  EXPECT_DOUBLE_EQ(r.rhs.front(), 0.0);
}

TEST(PathsDecomposition, AdjacentStatesOnlyLowerBound) {
  const auto ex = example1(10);
  const auto x = ex.chain.index_of("a4"), y = ex.chain.index_of("a5");
  std::vector<std::size_t> grid;
  for (std::size_t t = 0; t <= 200; t += 4) grid.push_back(t);
  const auto r = paths_decomposition_check(ex.chain, x, y, {ex.state("z")}, grid);
  EXPECT_FALSE(r.every_path_meets_target);
  EXPECT_GE(r.lower_bound_slack, -1e-9);
  EXPECT_GT(r.max_identity_violation, 1e-3);
}

TEST(PathsDecomposition, RequiresBalance) {
  const auto gc = example4(2, 2, 1);
  EXPECT_THROW(paths_decomposition_check(gc.chain, gc.role("L2n_a").front(), gc.state("b"), gc.role("Z"), {0, 10}),
               PreconditionFailed);
}

TEST(PathsDecomposition, LowerBoundOnBalancedGraphPairs) {
  for (const auto& gc : {example4(2, 2, 1), example5(2, 2, 1)}) {
    const auto& target = gc.role(gc.id == "4" ? "Z" : "Z'");
    std::vector<std::size_t> grid;
    for (std::size_t t = 0; t <= 400; t += 10) grid.push_back(t);
    const auto r = paths_decomposition_check(gc.chain, gc.state("a"), gc.state("b"), target, grid);
    EXPECT_GE(r.lower_bound_slack, -1e-9) << gc.id;
  }
}

TEST(Fill, TwoStateGeometric) {
  const auto f = fill_geometric_representation(lazy_pair(), 20);
  ASSERT_EQ(f.rates.size(), 1u);
  EXPECT_NEAR(f.rates[0], 0.5, 1e-14);
  EXPECT_NEAR(f.pmf[3], 0.125, 1e-14);
}

TEST(Fill, RandomFiveStateChains) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto rng = make_stream(seed, "test/fill");
    const auto bd = random_lazy_birth_death(5, rng);
    const auto f = fill_geometric_representation(bd, 400);
    HittingOptions o;
    o.horizon = 400;
    const auto h = hitting_distribution(bd, 0, {4}, o);
    for (std::size_t t = 0; t <= 400; ++t) ASSERT_NEAR(f.pmf[t], h.pmf[t], 1e-8);
    for (double b : f.rates) {
      EXPECT_GT(b, 0.0);
      EXPECT_LE(b, 1.0 + 1e-12);
    }
  }
}

TEST(Fill, Example5Projection) {
  const auto pm = bd_projection(example5(4, 2, 1));
  const std::size_t horizon = 4000;
  const auto f = fill_geometric_representation(pm.chain, horizon);
  HittingOptions o;
  o.horizon = horizon;
  const auto h = hitting_distribution(pm.chain, 0, {pm.chain.size() - 1}, o);
  for (std::size_t t = 0; t <= horizon; ++t) ASSERT_NEAR(f.pmf[t], h.pmf[t], 1e-8);
}

TEST(Fill, RejectsNonBirthDeath) {
  const auto ex = example1(5);
  EXPECT_THROW(fill_geometric_representation(ex.chain, 10), NotBirthDeath);
}

TEST(LogConcavity, GeometricAndConvolution) {
  for (double r : {0.1, 0.5, 0.9}) {
    const auto g = geometric_convolution({r}, 200);
    EXPECT_TRUE(log_concavity_check(g).log_concave);
    EXPECT_TRUE(log_concavity_check(geometric_convolution({r, 0.3}, 200)).log_concave);
  }
}

TEST(LogConcavity, Bimodal) {
  const auto r = log_concavity_check({0.4, 0.1, 0.4, 0.1});
  EXPECT_FALSE(r.log_concave);
  EXPECT_FALSE(r.unimodal);
  EXPECT_GT(r.worst_ratio_defect, 0.0);
}

TEST(TailQuantile, Examples) {
  EXPECT_EQ(tail_quantile(fixed({1.0}), 0.3), 0u);
  EXPECT_EQ(tail_quantile(geometric_half(60), 0.25), 2u);
}

TEST(TailQuantile, Example2FarEnd) {
  constexpr int n = 40;
  const auto ex = example2(n);
  const auto h = hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")});
  double mean = 0.0;
  for (std::size_t t = 0; t < h.pmf.size(); ++t) mean += t * h.pmf[t];
  EXPECT_NEAR(mean / n, 24.0, 0.5);
  // The spread is of order √n steps on the n scale, about 2.3n at n = 40.
  EXPECT_NEAR(static_cast<double>(tail_quantile(h, 0.5)) / n, 24.0, 1.0);
  EXPECT_GT(tail_quantile(h, 0.25), tail_quantile(h, 0.5));
}

TEST(TailQuantile, HorizonCap) {
  HittingOptions o;
  o.horizon = 5;
  const auto ex = example1(20);
  EXPECT_THROW(tail_quantile(hitting_distribution(ex.chain, ex.state("a"), {ex.state("z")}, o), 0.1), HorizonCap);
}

TEST(ModeSpread, Examples) {
  const auto p = mode_and_spread({0.0, 0.0, 1.0});
  EXPECT_EQ(p.mode, 2u);
  EXPECT_DOUBLE_EQ(p.mean, 2.0);
  EXPECT_DOUBLE_EQ(p.sd, 0.0);
  const auto g = mode_and_spread(geometric_half(200).pmf);
  EXPECT_EQ(g.mode, 1u);
  EXPECT_NEAR(g.mean, 2.0, 1e-12);
  EXPECT_EQ(mode_and_spread({0.25, 0.5, 0.25, 0.0}).mode, 1u);
  EXPECT_EQ(mode_and_spread({0.5, 0.5}).mode, 0u);
}

TEST(ModeSpread, Example5ProjectedConvolution) {
  for (int n : {2, 4}) {
    const auto pm = bd_projection(example5(n, 2, 1));
    const auto h = hitting_distribution(pm.chain, 0, {pm.chain.size() - 1});
    const auto s = mode_and_spread(convolve_pmfs(h.pmf, h.pmf));
    EXPECT_LE(std::abs(static_cast<double>(s.mode) - s.mean), 4.0 * s.sd) << "n=" << n;
  }
}

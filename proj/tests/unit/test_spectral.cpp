#include <gtest/gtest.h>

#include <cmath>

#include "mixlab/constructions.hpp"
#include "mixlab/distance.hpp"
#include "mixlab/error.hpp"
#include "mixlab/spectral.hpp"

using namespace mixlab;

namespace {

ChainSpec random_chain(std::uint64_t seed, std::size_t states, const char* stream = "test/spectral") {
  auto rng = make_stream(seed, stream);
  return random_reversible_lazy(states, rng);
}

GraphSpec complete_graph(std::size_t k) {
  GraphSpec g;
  for (std::size_t i = 0; i < k; ++i) g.add_vertex(std::to_string(i));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) g.add_edge(i, j);
  return g;
}

double kappa_from_gap(double gap) {
  const double c = gap / 2.0;  // certified Cheeger lower bound of the cap
  const double m = std::min(c / 3.0, 1.0 / 18.0);
  return m * m / 2.0;
}

}  // namespace

TEST(EigenSummary, SingleState) {
  Matrix k(1, 1);
  k << 1.0;
  const auto s = eigen_summary(build_chain(k));
  ASSERT_EQ(s.eigenvalues.size(), 1u);
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 1.0);
  EXPECT_FALSE(s.t_rel.has_value());
}

TEST(EigenSummary, TwoStateClosedForm) {
  for (auto [p, q] : {std::pair{0.2, 0.3}, std::pair{0.5, 0.5}, std::pair{0.1, 0.05}}) {
    Matrix k(2, 2);
    k << 1 - p, p, q, 1 - q;
    const auto s = eigen_summary(build_chain(k));
    EXPECT_NEAR(s.lambda2, 1 - p - q, 1e-12);
  }
}

TEST(EigenSummary, Example1GapBoundedBelow) {
  std::vector<double> gaps;
  for (int n : {20, 40, 80}) gaps.push_back(1.0 - eigen_summary(example1(n).chain).lambda2);
  for (double g : gaps) EXPECT_GT(g, 0.01);
  EXPECT_GT(gaps.back(), 0.5 * gaps.front());
}

TEST(EigenSummary, ResidualsAndLaziness) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = random_chain(seed, 3 + seed % 22);
    const auto s = eigen_summary(c);
    EXPECT_NEAR(s.eigenvalues.front(), 1.0, 1e-9);
    EXPECT_GE(s.lambda_min, -1e-9);
    EXPECT_LE(s.max_residual, 1e-8);
    ASSERT_TRUE(s.t_rel.has_value());
    EXPECT_NEAR(*s.t_rel, 1.0 / (1.0 - s.lambda2), 1e-9 * *s.t_rel);
    // Right eigenvector of the kernel itself.
    const Vector pf = c.kernel() * s.second_right_eigenvector;
    EXPECT_LT((pf - s.lambda2 * s.second_right_eigenvector).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(EigenSummary, CompleteGraphK4) {
  const auto s = eigen_summary(lazy_srw_chain(complete_graph(4)));
  EXPECT_NEAR(s.lambda2, 1.0 / 3.0, 1e-12);
}

TEST(Cheeger, TwoStateLazy) {
  Matrix k(2, 2);
  k << 0.5, 0.5, 0.5, 0.5;
  const auto e = cheeger_exact(build_chain(k));
  ASSERT_TRUE(e.exact.has_value());
  EXPECT_NEAR(*e.exact, 0.5, 1e-15);
}

TEST(Cheeger, CompleteGraphByHand) {
  // Lazy K4: singletons give 1/2, pairs give 1/3.
  const auto e = cheeger_exact(lazy_srw_chain(complete_graph(4)));
  EXPECT_NEAR(*e.exact, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(e.witness_set.size(), 2u);
  EXPECT_NEAR(set_conductance(lazy_srw_chain(complete_graph(4)), e.witness_set), 1.0 / 3.0, 1e-15);
}

TEST(Cheeger, TooLarge) { EXPECT_THROW(cheeger_exact(example1(15).chain), TooLargeForExact); }

TEST(Cheeger, SandwichAndBoundsOnRandomChains) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = random_chain(seed, 2 + seed % 13, "test/cheeger");
    const auto exact = cheeger_exact(c);
    const auto s = eigen_summary(c);
    const double phi = *exact.exact, gap = 1.0 - s.lambda2;
    EXPECT_LE(phi * phi / 2.0, gap + 1e-9);
    EXPECT_LE(gap, 2.0 * phi + 1e-9);
    const auto b = cheeger_bounds(c, s);
    EXPECT_LE(b.lower, b.upper);
    EXPECT_LE(b.lower, phi + 1e-12);
    EXPECT_GE(b.upper, phi - 1e-12);
  }
}

TEST(Cheeger, ExcisedExample5HasPositiveLowerBound) {
  const auto gc = example5(2, 2, 1);
  const auto hat = stretched_excision(gc);
  const auto b = cheeger_bounds(hat.chain);
  EXPECT_GT(b.lower, 0.0);
  EXPECT_LE(b.lower, b.upper);
  ASSERT_TRUE(gc.expander_gap.has_value());
  RecordProperty("hat_cheeger_lower", std::to_string(b.lower));
  RecordProperty("kappa", std::to_string(kappa_from_gap(*gc.expander_gap)));
}

TEST(L2Contraction, StationaryStartIsZero) {
  const auto c = random_chain(2, 8);
  const auto s = eigen_summary(c);
  EXPECT_NEAR(l2_contraction_bound(c, c.stationary(), 5, s), 0.0, 1e-12);
}

TEST(L2Contraction, PointMassNormOnUniform) {
  const auto c = lazy_srw_chain(complete_graph(5));
  const auto s = eigen_summary(c);
  Vector mu = Vector::Zero(5);
  mu(0) = 1.0;
  EXPECT_NEAR(l2_contraction_bound(c, mu, 0, s), 2.0, 1e-12);  // √(k−1) with k = 5
}

TEST(L2Contraction, HoldsOnRandomTriples) {
  auto rng = make_stream(11, "test/l2");
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = random_chain(seed, 2 + seed % 20, "test/l2chain");
    const auto s = eigen_summary(c);
    Vector mu(c.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = uniform01(rng);
    mu /= mu.sum();
    EXPECT_GE(l2_contraction_slack(c, mu, 1 + uniform_index(rng, 50), s), -1e-12);
  }
}

TEST(L2Contraction, ExcisedExample4MixesByTheAdvertisedTime) {
  constexpr int n = 2;
  const auto gc = example4(n, 2, 1);
  const auto hat = stretched_excision(gc);
  const auto s = eigen_summary(hat.chain);
  const double kappa = kappa_from_gap(*gc.expander_gap);
  const auto t = static_cast<std::size_t>(std::ceil(n / kappa * std::log(9.0)));
  double worst = 0.0;
  for (std::size_t x = 0; x < hat.chain.size(); ++x) {
    Vector mu = Vector::Zero(static_cast<Eigen::Index>(hat.chain.size()));
    mu(static_cast<Eigen::Index>(x)) = 1.0;
    worst = std::max(worst, l2_contraction_bound(hat.chain, mu, t, s) / 2.0);
  }
  EXPECT_LE(worst, 6.0 * std::pow(8.0 / 9.0, n));
}

TEST(StationaryTail, WholeSpaceAndTimeZero) {
  const auto c = random_chain(3, 7);
  std::vector<std::size_t> all(c.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double trel = *eigen_summary(c).t_rel;
  EXPECT_DOUBLE_EQ(hitting_from_stationary_tail(c, all, 3, trel).lhs, 0.0);
  const auto at0 = hitting_from_stationary_tail(c, {0}, 0, trel);
  EXPECT_NEAR(at0.lhs, 1.0 - c.stationary()(0), 1e-12);
  EXPECT_NEAR(at0.rhs, at0.lhs, 1e-12);
  EXPECT_THROW(stationary_start_survival(c, {}, 3), EmptyTargetSet);
}

TEST(StationaryTail, Example1Centre) {
  constexpr int n = 50;
  const auto ex = example1(n);
  const double trel = *eigen_summary(ex.chain).t_rel;
  for (std::size_t t : {std::size_t{n}, std::size_t{6 * n}, std::size_t{12 * n}}) {
    const auto cmp = hitting_from_stationary_tail(ex.chain, {ex.state("z")}, t, trel);
    EXPECT_GE(cmp.slack(), 0.0) << "t=" << t;
  }
}

TEST(StationaryTail, HoldsOnRandomTriples) {
  auto rng = make_stream(12, "test/tail");
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = random_chain(seed, 2 + seed % 20, "test/tailchain");
    const double trel = *eigen_summary(c).t_rel;
    std::vector<std::size_t> a;
    for (std::size_t x = 0; x < c.size(); ++x)
      if (uniform01(rng) < 0.3) a.push_back(x);
    if (a.empty()) a.push_back(0);
    const auto surv = stationary_start_survival(c, a, 100);
    double pa = 0.0;
    for (auto x : a) pa += c.stationary()(x);
    for (std::size_t t = 0; t <= 100; ++t)
      EXPECT_LE(surv[t], (1 - pa) * std::exp(-static_cast<double>(t) * pa / trel) + 1e-12);
  }
}

TEST(ProductCondition, ConstantChainIsNotGrowing) {
  const auto c = random_chain(1, 6);
  const double trel = *eigen_summary(c).t_rel;
  const double tmix = mixing_time(c, 0.25, Metric::tv(), 1000).steps;
  const auto r = product_condition_report({{1, trel, tmix}, {2, trel, tmix}, {3, trel, tmix}});
  EXPECT_FALSE(r.growing);
  EXPECT_FALSE(r.note.empty());
}

TEST(ProductCondition, Example1Grows) {
  std::vector<ProductConditionEntry> sweep;
  for (int n : {25, 50, 100}) {
    const auto ex = example1(n);
    sweep.push_back({static_cast<double>(n), *eigen_summary(ex.chain).t_rel,
                     static_cast<double>(mixing_time(ex.chain, 0.25, Metric::tv(), 100 * n).steps)});
  }
  const auto r = product_condition_report(sweep);
  EXPECT_TRUE(r.growing);
  EXPECT_NEAR(r.growth, 4.0, 1.5);  // roughly linear in n over a 4x range
}

TEST(ProductCondition, Example3Grows) {
  std::vector<ProductConditionEntry> sweep;
  for (int n : {4, 6, 8}) {
    const auto ex = example3(n, 10);
    sweep.push_back({static_cast<double>(n), *eigen_summary(ex.chain).t_rel,
                     static_cast<double>(mixing_time(ex.chain, 0.25, Metric::tv(), 200 * n * 10).steps)});
  }
  EXPECT_TRUE(product_condition_report(sweep).growing);
}

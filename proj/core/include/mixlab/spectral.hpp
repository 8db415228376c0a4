#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixlab/chain.hpp"

namespace mixlab {

struct SpectralSummary {
  std::vector<double> eigenvalues;  // descending
  double lambda2 = 0.0;
  double lambda_min = 1.0;
  std::optional<double> t_rel;      // unset for a single state; +inf when the absolute gap vanishes
  double max_residual = 0.0;        // max over pairs of ||S u - λ u||_inf on the symmetrized kernel
  Vector second_right_eigenvector;  // P f = λ2 f, scaled to sup-norm 1

  double absolute_gap() const;
};

struct CheegerEstimate {
  double lower = 0.0;
  double upper = 1.0;
  std::optional<double> exact;
  std::vector<std::size_t> witness_set;  // attains `upper` (or `exact`)
};

// π-symmetrized kernel S = D^{1/2} P D^{-1/2}, formed entrywise as sqrt(P(x,y)P(y,x)).
Matrix symmetrized_kernel(const ChainSpec& chain);

SpectralSummary eigen_summary(const ChainSpec& chain, std::size_t dense_limit = kDefaultDenseLimit);
// Eigenvalues only (descending); cheaper for large symmetric problems.
std::vector<double> spectrum(const ChainSpec& chain, std::size_t dense_limit = 8192);
double relaxation_time(const std::vector<double>& descending_eigenvalues);

// Q(A)/π(A) for the indicated set.
double set_conductance(const ChainSpec& chain, const std::vector<std::size_t>& set);
CheegerEstimate cheeger_exact(const ChainSpec& chain, std::size_t max_states = 20);
CheegerEstimate cheeger_bounds(const ChainSpec& chain, std::size_t dense_limit = kDefaultDenseLimit);
CheegerEstimate cheeger_bounds(const ChainSpec& chain, const SpectralSummary& summary);

// λ^t ||μ − π||_{2,π} with λ = max(λ2, |λ_min|).
double l2_contraction_bound(const ChainSpec& chain, const Vector& mu, std::size_t t, const SpectralSummary& summary);
// min over t ≤ t_max of (bound − 2 TV(μP^t, π)); negative means a violation.
double l2_contraction_slack(const ChainSpec& chain, const Vector& mu, std::size_t t_max,
                            const SpectralSummary& summary);

struct TailComparison {
  double lhs = 0.0;  // Pr_π[T_A > t]
  double rhs = 0.0;  // (1 − π(A)) exp(−t π(A) / t_rel)
  double slack() const { return rhs - lhs; }
};

// Pr_π[T_A > t] for t = 0..t_max by killed evolution from π.
std::vector<double> stationary_start_survival(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                              std::size_t t_max);
TailComparison hitting_from_stationary_tail(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                            std::size_t t, double t_rel);

struct ProductConditionEntry {
  double n = 0.0;
  double t_rel = 0.0;
  double t_mix = 0.0;
  double product() const { return t_mix / t_rel; }
};

struct ProductConditionReport {
  std::vector<ProductConditionEntry> entries;
  double growth = 1.0;  // last product / first product
  bool growing = false;
  std::string note;
};

// Heuristic: "growing" iff (gap · t_mix) rises by at least 1.5x across the sweep.
ProductConditionReport product_condition_report(std::vector<ProductConditionEntry> sweep);

}  // namespace mixlab

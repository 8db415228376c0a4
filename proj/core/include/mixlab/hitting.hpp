#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixlab/chain.hpp"

namespace mixlab {

struct HittingDistribution {
  std::string source;               // label or a description of the source law
  std::vector<std::size_t> target;  // sorted state indices
  std::vector<double> pmf;          // pmf[t] = Pr[T_Z = t], t = 0..horizon
  std::size_t horizon = 0;
  double residual = 0.0;            // Pr[T_Z > horizon]

  // Pr[T_Z > t]; beyond the horizon only the residual is known.
  double survival(std::size_t t) const;
  std::vector<double> survival_curve() const;
  double max_pmf() const;
};

// Absorbed mass at each step, split by landing state: rows[t][i] is the mass
// first entering Z at time t through state target[i].
struct AbsorptionProfile {
  std::vector<std::size_t> target;
  std::vector<std::vector<double>> rows;
};

struct HittingOptions {
  std::optional<std::size_t> horizon;  // fixed horizon; otherwise run until residual < threshold
  double residual_threshold = 1e-12;
  std::size_t cap = 10'000'000;
  bool record_profile = false;
};

struct HittingResult {
  HittingDistribution distribution;
  std::optional<AbsorptionProfile> profile;
};

HittingResult hitting_pmf(const ChainSpec& chain, const Vector& source, std::vector<std::size_t> target,
                          const HittingOptions& options = {}, std::string source_name = "distribution");
HittingResult hitting_pmf(const ChainSpec& chain, std::size_t source, std::vector<std::size_t> target,
                          const HittingOptions& options = {});
// Convenience: distribution only.
HittingDistribution hitting_distribution(const ChainSpec& chain, std::size_t source,
                                         std::vector<std::size_t> target, const HittingOptions& options = {});

struct ConvolvedHitting {
  std::vector<double> pmf;
  double residual = 0.0;  // mass not represented in pmf
  HittingDistribution first;
  HittingDistribution second;

  double survival(std::size_t t) const;
};

// Exact discrete convolution; the operands are put in a canonical order first
// so that convolve(a, b) and convolve(b, a) are bit-identical.
ConvolvedHitting convolve(const HittingDistribution& h1, const HittingDistribution& h2);
std::vector<double> convolve_pmfs(const std::vector<double>& a, const std::vector<double>& b);

struct BalanceReport {
  bool balanced = false;
  double max_deviation = 0.0;
};

BalanceReport balanced_check(const ChainSpec& chain, std::size_t x, const std::vector<std::size_t>& target,
                             std::optional<std::size_t> horizon = std::nullopt, double tolerance = 1e-9);

struct DominanceReport {
  bool dominates = false;
  double max_violation = 0.0;  // max over t of S2(t) − S1(t), floored at 0
};

// Does h1 stochastically dominate h2 (S1 ≥ S2 pointwise)?
DominanceReport stochastic_dominance(const HittingDistribution& h1, const HittingDistribution& h2,
                                     double slack = 1e-12);

struct PathsDecompositionReport {
  bool every_path_meets_target = false;
  std::vector<std::size_t> times;
  std::vector<double> lhs;                // P^t(x,y)/π(y)
  std::vector<double> rhs;                // Σ_k P[T^{x,y}=k] Pr_{π_Z}^{t−k}(Z)/π(Z)
  std::vector<double> convolved_cdf;      // P[T^{x,y} ≤ t]
  double lower_bound_slack = 0.0;         // min (lhs − rhs)
  double cdf_bound_slack = 0.0;           // min (rhs − cdf)
  double max_identity_violation = 0.0;    // max |lhs − rhs|
  std::optional<double> upper_bound_slack;  // min (cdf + error term − rhs), needs t_rel
};

PathsDecompositionReport paths_decomposition_check(const ChainSpec& chain, std::size_t x, std::size_t y,
                                                   const std::vector<std::size_t>& target,
                                                   const std::vector<std::size_t>& t_grid,
                                                   std::optional<double> t_rel = std::nullopt);

// True iff every path from x to y visits the target set.
bool every_path_meets(const ChainSpec& chain, std::size_t x, std::size_t y, const std::vector<std::size_t>& target);

struct FillRepresentation {
  std::vector<double> rates;  // β_i, eigenvalues of I − P' on the killed block, ascending
  std::vector<double> pmf;    // law of Σ Geom(β_i) on {1,2,...}, t = 0..horizon
  double residual = 0.0;
};

// Hitting time of the last state from the first state of a lazy birth-and-death chain.
FillRepresentation fill_geometric_representation(const ChainSpec& bd_chain, std::size_t horizon);
std::vector<double> geometric_convolution(const std::vector<double>& rates, std::size_t horizon);

struct LogConcavityReport {
  bool log_concave = false;
  bool unimodal = false;
  double worst_ratio_defect = 0.0;  // max of (μ(t−1)μ(t+1) − μ(t)²)/μ(t)² over the support
  std::size_t worst_index = 0;
};

LogConcavityReport log_concavity_check(const std::vector<double>& pmf, double tolerance = 1e-9,
                                       double support_floor = 1e-250);

std::size_t tail_quantile(const HittingDistribution& h, double p);

struct ModeSpread {
  std::size_t mode = 0;
  double mean = 0.0;
  double sd = 0.0;
};

ModeSpread mode_and_spread(const std::vector<double>& pmf);

}  // namespace mixlab

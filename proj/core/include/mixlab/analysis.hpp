#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixlab/chain.hpp"
#include "mixlab/constructions.hpp"
#include "mixlab/distance.hpp"
#include "mixlab/hitting.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

inline constexpr double kSlackTolerance = 1e-9;

// Machine-readable outcome of one verification. `slack` is the margin by
// which the checked inequality holds; negative means violated.
struct CheckResult {
  std::string check_id;
  std::map<std::string, double> params;
  double slack = 0.0;
  bool pass = false;
  std::string note;
};

CheckResult make_check(std::string check_id, std::map<std::string, double> params, double slack,
                       double tolerance = kSlackTolerance, std::string note = {});

// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
// rethrown on the caller (first by index).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Evaluates a worst-case metric along P^0, P^1, ... until it is at most
// `stop` or `cap` steps have been taken.
DistanceCurve curve_until(const ChainSpec& chain, const Metric& metric, double stop, std::size_t cap,
                          std::size_t dense_limit = kDefaultDenseLimit, const std::string& chain_id = "");

// ---------------------------------------------------------------- cutoff

enum class Verdict { cutoff_trend, no_cutoff_trend, inconclusive };
std::string verdict_name(Verdict v);

inline const std::vector<double> kDefaultEpsGrid{0.05, 0.1, 0.25, 0.4, 0.45};

struct CutoffRow {
  int n = 0;
  std::size_t states = 0;
  std::vector<std::size_t> t_eps;         // t(ε)
  std::vector<std::size_t> t_complement;  // t(1−ε)
  std::vector<double> ratio;              // t(ε)/t(1−ε)
  std::vector<double> window;             // t(ε) − t(1−ε)
  double max_ratio() const;
};

struct CutoffReport {
  Metric metric;
  std::vector<int> n_grid;
  std::vector<double> eps_grid;
  std::vector<CutoffRow> rows;
  Verdict verdict = Verdict::inconclusive;
  std::string rule;  // human-readable statement of the heuristic used
};

using ChainBuilder = std::function<ChainSpec(int n)>;

struct SweepOptions {
  std::size_t horizon_cap = 2'000'000;
  std::size_t dense_limit = kDefaultDenseLimit;
  unsigned threads = 1;
};

CutoffReport cutoff_sweep(const ChainBuilder& builder, const std::vector<int>& n_grid,
                          const std::vector<double>& eps_grid, const Metric& metric, const SweepOptions& options = {});

// Heuristic trend classification over the n-grid:
//  plateau(ε): ratio(ε) never falls by more than 2% between consecutive n and
//              is still ≥ 1.05 at the largest n;
//  no-cutoff-trend if some ε plateaus;
//  cutoff-trend if the max-over-ε ratio never rises by more than 2% and its
//              excess over 1 shrinks to at most 70% of its initial value;
//  inconclusive otherwise.
Verdict classify_cutoff(const CutoffReport& report);

// Max over ε of the ratio at the largest n.
double precutoff_ratio(const CutoffReport& report);

// ---------------------------------------------------------------- profiles

struct ProfileComparison {
  std::string mode;               // "worst-case", "designated-source", "pair"
  std::vector<double> measured;   // indexed by t
  std::vector<double> reference;  // indexed by t
  double gap = 0.0;               // sup-norm of measured − reference over the compared range
  std::size_t gap_at = 0;
  double target_mass = 0.0;
  std::vector<CheckResult> hypotheses;
};

struct ProfileOptions {
  double min_target_mass = 0.01;
  std::optional<std::size_t> horizon;
  double drain = 1e-6;  // auto horizon: run until both curves fall below this
  std::size_t horizon_cap = 1'000'000;
  std::size_t dense_limit = kDefaultDenseLimit;
};

// max over sources x of Pr_x[T_Z > t], for t = 0..horizon, in one backward pass.
std::vector<double> max_survival(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                 const std::vector<std::size_t>& sources, std::size_t horizon);

// d(t) against the hitting tail max_x Pr_x[T_Z > t]. With no sources the
// worst case over all states is used on both sides.
ProfileComparison tv_profile_vs_hitting(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                        const std::vector<std::size_t>& sources = {},
                                        const ProfileOptions& options = {});

struct SeparationRoles {
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<std::size_t> target;
  std::vector<std::size_t> A;  // optional; defaults to {a}
  std::vector<std::size_t> B;  // optional; defaults to {b}
};

// d_sep(t) against Pr[T_Z^{a,b} > t]. Exact hypotheses (balancedness, every
// A-to-B path meeting Z) throw PreconditionFailed when they fail; the
// asymptotic ones are reported with their finite-n slack.
ProfileComparison sep_profile_vs_hitting(const ChainSpec& chain, const SeparationRoles& roles,
                                         const ProfileOptions& options = {});

// Sup-norm gap between curve[⌊s·scale⌋] and reference(s) over an s-grid,
// skipping grid points within `guard` of any listed discontinuity.
struct StaircaseComparison {
  std::vector<double> s_used;
  std::vector<double> measured;
  std::vector<double> expected;
  double gap = 0.0;
};

StaircaseComparison compare_staircase(const std::vector<double>& curve, double scale,
                                      const std::function<double(double)>& reference,
                                      const std::vector<double>& s_grid,
                                      const std::vector<double>& discontinuities = {}, double guard = 0.5);

// ---------------------------------------------------------------- verifiers

// d(t) ≤ d_sep(t) ≤ 1 − (1 − min(2d(⌊t/2⌋), 1))² ≤ 4 d(⌊t/2⌋) for t ≤ horizon,
// together with t_mix(a) ≤ t_sep(a) ≤ 2 t_mix(a/4) wherever both are reached.
CheckResult verify_tv_sep_chain(const ChainSpec& chain, std::size_t horizon);

// t_sep(1−ε) ≤ 2 t_mix(1−2√ε) + 2 t_rel log(1/ε), ε ∈ (0, 1/4).
CheckResult verify_separation_relaxation_bound(const ChainSpec& chain, double eps,
                                               std::size_t horizon_cap = 1'000'000);

struct TimePair {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t s = 0;
  std::size_t t = 0;
};

// P^{s+t}(x,y)/π(y) ≥ (1 − ‖P_x^t − P_y^s‖_TV)².
CheckResult verify_cauchy_schwarz_bound(const ChainSpec& chain, const std::vector<TimePair>& samples);
std::vector<TimePair> sample_time_pairs(const ChainSpec& chain, Rng& rng, std::size_t count,
                                        std::size_t max_time = 100);

double binomial_log_pmf(std::size_t n, std::size_t k);
// TV(Bin(t1, 1/2), Bin(t2, 1/2)) by direct summation.
double binomial_tv(std::size_t t1, std::size_t t2);

// d(t) − d(t+s) ≤ TV(Bin(t,½), Bin(t+s,½)).
CheckResult verify_window_binomial(const ChainSpec& chain, std::size_t t, std::size_t s);
// TV(Bin(t,½), Bin(t+⌊c√t⌋,½)) ≤ 1/2.
CheckResult binomial_window_half(std::size_t t, double c = 1.0);

// ℓp mixing-time comparisons for p > 2 and p ∈ (1, 2); one result per (p, a).
std::vector<CheckResult> lp_mixing_comparison(const ChainSpec& chain, const std::vector<double>& p_list,
                                              const std::vector<double>& a_list,
                                              std::size_t horizon_cap = 1'000'000);

struct SandwichReport {
  std::size_t t_hit = 0;  // min{t : Pr_x[T_Z > t] ≤ p}
  std::size_t s_eps = 0;
  std::size_t r_eps = 0;
  double t_rel = 0.0;
  double target_mass = 0.0;
  CheckResult lower;  // TV at max(t_hit − s_ε, 0) exceeds p − ε
  CheckResult upper;  // TV at t_hit + r_ε is at most p + ε (needs balancedness)
};

SandwichReport hit_vs_mix_sandwich(const ChainSpec& chain, std::size_t x, const std::vector<std::size_t>& target,
                                   double p, double eps);

// Hitting-from-stationarity tail Pr_π[T_A > t] ≤ (1 − π(A)) exp(−t π(A)/t_rel), t ≤ horizon.
CheckResult verify_stationary_tail(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                   std::size_t horizon, double t_rel);

// Φ²/2 ≤ 1 − λ2 ≤ 2Φ with the exact Cheeger constant.
CheckResult verify_cheeger_sandwich(const ChainSpec& chain);

// 2 TV(μP^t, π) ≤ λ^t ‖μ − π‖_{2,π} from every point mass.
CheckResult verify_l2_contraction(const ChainSpec& chain, std::size_t horizon);

// Geometric-convolution law against the absorption pmf on a lazy birth-and-death chain.
CheckResult verify_fill_representation(const ChainSpec& bd_chain, double residual = 1e-10);

// ---------------------------------------------------------------- window one

struct WindowOneReport {
  int n = 0;
  int L = 0;
  std::size_t levels = 0;
  std::vector<double> single;     // law of T_{Z'} from a in the projection
  std::vector<double> convolved;  // law of T_{Z'}^{a,b}
  LogConcavityReport concavity;
  ModeSpread spread;
  std::size_t support_start = 0;
  std::size_t growth_end = 0;  // z* − ⌊δn⌋
  double alpha = 0.0;          // min pmf(t+1)/pmf(t) on [support_start, growth_end)
  double target_mass = 0.0;    // π(Z') in the full chain
  double survival_at_mode = 0.0;
  std::vector<CheckResult> checks;
};

WindowOneReport window_one_analysis(int n, int L, std::uint64_t seed, double delta = 1.0,
                                    const GraphExampleOptions& options = {});
WindowOneReport window_one_analysis(const GraphChain& example5_chain, double delta = 1.0);

// ---------------------------------------------------------------- suite

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t chains = 200;
  std::size_t max_states = 25;
  std::size_t horizon = 200;
  std::size_t cheeger_max_states = 14;
  std::size_t bd_chains = 200;
  std::size_t bd_max_states = 40;
  std::vector<std::string> only;  // substring filters on check ids; empty runs everything
  unsigned threads = 1;
};

struct CheckSummary {
  std::string check_id;
  std::size_t count = 0;
  std::size_t failures = 0;
  double worst_slack = 0.0;
};

struct SuiteReport {
  std::vector<CheckResult> results;
  std::vector<CheckSummary> summary;
  bool all_pass() const;
};

std::vector<std::string> suite_check_ids();
SuiteReport run_verify_suite(const SuiteOptions& options);
std::vector<CheckSummary> summarize(const std::vector<CheckResult>& results);

// Copy of a kernel with one off-diagonal entry raised by `amount` and its
// row renormalized; chosen so that detailed balance can no longer hold.
SparseKernel inject_fault(const SparseKernel& kernel, Rng& rng, double amount = 1e-3);

}  // namespace mixlab

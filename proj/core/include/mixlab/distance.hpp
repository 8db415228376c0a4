#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixlab/chain.hpp"

namespace mixlab {

struct Metric {
  enum class Kind { tv, separation, dbar, lp };
  Kind kind = Kind::tv;
  double p = 2.0;  // only for lp; +inf allowed

  static Metric tv() { return {Kind::tv, 0.0}; }
  static Metric separation() { return {Kind::separation, 0.0}; }
  static Metric dbar() { return {Kind::dbar, 0.0}; }
  static Metric lp(double p) { return {Kind::lp, p}; }
  // Accepts "tv", "separation"/"sep", "dbar", "lp:<p>", "lp:inf".
  static Metric parse(std::string_view text);

  std::string name() const;
  bool bounded() const { return kind != Kind::lp; }
};

struct DistanceCurve {
  Metric metric;
  std::vector<double> values;  // values[t] for t = 0..horizon
  std::size_t horizon = 0;
  double tolerance = 1e-10;
  bool restricted = false;  // restricted-pair separation: a lower bound on the true value
  std::string chain_id;

  double at(std::size_t t) const { return values.at(t); }
  // Largest increase between consecutive samples (0 for a monotone curve).
  double max_increase() const;
};

struct TvForms {
  double half_l1;
  double one_minus_overlap;
  double max_event;  // sup over events, attained at {μ > ν}
};

TvForms tv_distance_forms(const Vector& mu, const Vector& nu);
double tv_distance(const Vector& mu, const Vector& nu);
// π-weighted ℓp norm of (μ−ν)/π; p may be +infinity.
double lp_distance(const Vector& mu, const Vector& nu, const Vector& pi, double p);

double worst_tv_from(const ChainSpec& chain, std::size_t x, std::size_t t);
double worst_tv(const ChainSpec& chain, std::size_t t, std::size_t dense_limit = kDefaultDenseLimit);
double separation(const ChainSpec& chain, std::size_t t, std::size_t dense_limit = kDefaultDenseLimit);
double dbar(const ChainSpec& chain, std::size_t t, std::size_t dense_limit = kDefaultDenseLimit);

// Per-row quantities of a matrix whose rows are time-t laws.
double row_tv(const Matrix& laws, Eigen::Index row, const Vector& pi);
double row_lp(const Matrix& laws, Eigen::Index row, const Vector& pi, double p);
double metric_of_power(const Matrix& laws, const Vector& pi, const Metric& metric);

// Exact worst-case curves for every requested metric from one dense sweep.
std::vector<DistanceCurve> distance_curves(const ChainSpec& chain, const std::vector<Metric>& metrics,
                                           std::size_t horizon, std::size_t dense_limit = kDefaultDenseLimit,
                                           const std::string& chain_id = "");
DistanceCurve distance_curve(const ChainSpec& chain, const Metric& metric, std::size_t horizon,
                             std::size_t dense_limit = kDefaultDenseLimit, const std::string& chain_id = "");

// Max over the given sources of d_x(t), by sparse evolution (no dense storage).
DistanceCurve tv_curve_from_sources(const ChainSpec& chain, const std::vector<std::size_t>& sources,
                                    std::size_t horizon, const std::string& chain_id = "");
// 1 − min over the listed pairs of P^t(x,y)/π(y); flagged as restricted.
DistanceCurve separation_restricted(const ChainSpec& chain,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                    std::size_t horizon, const std::string& chain_id = "");

struct MixingTime {
  std::size_t steps = 0;
  bool reached = false;
};

MixingTime mixing_time(const DistanceCurve& curve, double eps);
MixingTime mixing_time(const ChainSpec& chain, double eps, const Metric& metric, std::size_t horizon,
                       std::size_t dense_limit = kDefaultDenseLimit);

}  // namespace mixlab

#include "mixlab/distance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("distributions have different supports");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

Metric Metric::parse(std::string_view text) {
  if (text == "tv") return tv();
  if (text == "separation" || text == "sep") return separation();
  if (text == "dbar") return dbar();
  if (text.rfind("lp", 0) == 0) {
    auto rest = text.substr(2);
    if (!rest.empty() && (rest.front() == ':' || rest.front() == '=')) rest.remove_prefix(1);
    if (rest == "inf" || rest == "infinity") return lp(kInf);
    try {
      const double p = std::stod(std::string(rest));
      if (p >= 1.0) return lp(p);
    } catch (const std::exception&) {
    }
  }
  throw InvalidArgument("unknown metric '" + std::string(text) + "'");
}

std::string Metric::name() const {
  switch (kind) {
    case Kind::tv: return "tv";
    case Kind::separation: return "separation";
    case Kind::dbar: return "dbar";
    case Kind::lp: {
      if (std::isinf(p)) return "lp:inf";
      std::ostringstream s;
      s << "lp:" << p;
      return s.str();
    }
  }
  return "?";
}

double DistanceCurve::max_increase() const {
  double worst = 0.0;
  for (std::size_t t = 1; t < values.size(); ++t) worst = std::max(worst, values[t] - values[t - 1]);
  return worst;
}

TvForms tv_distance_forms(const Vector& mu, const Vector& nu) {
  check_same_size(mu, nu);
  const Vector diff = mu - nu;
  return {0.5 * diff.cwiseAbs().sum(), 1.0 - mu.cwiseMin(nu).sum(), diff.cwiseMax(0.0).sum()};
}

double tv_distance(const Vector& mu, const Vector& nu) {
  check_same_size(mu, nu);
  return 0.5 * (mu - nu).cwiseAbs().sum();
}

double lp_distance(const Vector& mu, const Vector& nu, const Vector& pi, double p) {
  check_same_size(mu, nu);
  check_same_size(mu, pi);
  if ((pi.array() <= 0.0).any()) throw ZeroStationaryMass("lp distance needs a strictly positive reference");
  if (p < 1.0) throw InvalidArgument("lp distance needs p >= 1");
  const Eigen::ArrayXd ratio = ((mu - nu).array() / pi.array()).abs();
  if (std::isinf(p)) return ratio.maxCoeff();
  return std::pow((pi.array() * ratio.pow(p)).sum(), 1.0 / p);
}

double row_tv(const Matrix& laws, Eigen::Index row, const Vector& pi) {
  return 0.5 * (laws.row(row).transpose() - pi).cwiseAbs().sum();
}

double row_lp(const Matrix& laws, Eigen::Index row, const Vector& pi, double p) {
  const Eigen::ArrayXd ratio = ((laws.row(row).transpose() - pi).array() / pi.array()).abs();
  if (std::isinf(p)) return ratio.maxCoeff();
  return std::pow((pi.array() * ratio.pow(p)).sum(), 1.0 / p);
}

double metric_of_power(const Matrix& laws, const Vector& pi, const Metric& metric) {
  const Eigen::Index n = laws.rows();
  switch (metric.kind) {
    case Metric::Kind::tv: {
      double worst = 0.0;
      for (Eigen::Index x = 0; x < n; ++x) worst = std::max(worst, row_tv(laws, x, pi));
      return clamp01(worst);
    }
    case Metric::Kind::separation: {
      double min_ratio = kInf;
      for (Eigen::Index y = 0; y < laws.cols(); ++y) min_ratio = std::min(min_ratio, laws.col(y).minCoeff() / pi[y]);
      return clamp01(1.0 - min_ratio);
    }
    case Metric::Kind::dbar: {
      double worst = 0.0;
      for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = x + 1; y < n; ++y) {
          worst = std::max(worst, 0.5 * (laws.row(x) - laws.row(y)).cwiseAbs().sum());
        }
      }
      return clamp01(worst);
    }
    case Metric::Kind::lp: {
      double worst = 0.0;
      for (Eigen::Index x = 0; x < n; ++x) worst = std::max(worst, row_lp(laws, x, pi, metric.p));
      return worst;
    }
  }
  return 0.0;
}

std::vector<DistanceCurve> distance_curves(const ChainSpec& chain, const std::vector<Metric>& metrics,
                                           std::size_t horizon, std::size_t dense_limit,
                                           const std::string& chain_id) {
  std::vector<DistanceCurve> curves;
  for (const auto& m : metrics) {
    DistanceCurve c;
    c.metric = m;
    c.horizon = horizon;
    c.chain_id = chain_id;
    c.values.reserve(horizon + 1);
    curves.push_back(std::move(c));
  }
  if (metrics.empty()) return curves;
  KernelPowerSweep sweep(chain, dense_limit);
  for (std::size_t t = 0; t <= horizon; ++t) {
    if (t > 0) sweep.advance();
    for (auto& c : curves) c.values.push_back(metric_of_power(sweep.current(), chain.stationary(), c.metric));
  }
  return curves;
}

DistanceCurve distance_curve(const ChainSpec& chain, const Metric& metric, std::size_t horizon,
                             std::size_t dense_limit, const std::string& chain_id) {
  return distance_curves(chain, {metric}, horizon, dense_limit, chain_id).front();
}

namespace {

Matrix power_at(const ChainSpec& chain, std::size_t t, std::size_t dense_limit) {
  KernelPowerSweep sweep(chain, dense_limit);
  for (std::size_t s = 0; s < t; ++s) sweep.advance();
  return sweep.current();
}

}  // namespace

double worst_tv_from(const ChainSpec& chain, std::size_t x, std::size_t t) {
  const auto law = evolve(chain, DistributionVector::point_mass(chain.size(), x), t);
  return tv_distance(law.p, chain.stationary());
}

double worst_tv(const ChainSpec& chain, std::size_t t, std::size_t dense_limit) {
  return metric_of_power(power_at(chain, t, dense_limit), chain.stationary(), Metric::tv());
}

double separation(const ChainSpec& chain, std::size_t t, std::size_t dense_limit) {
  return metric_of_power(power_at(chain, t, dense_limit), chain.stationary(), Metric::separation());
}

double dbar(const ChainSpec& chain, std::size_t t, std::size_t dense_limit) {
  return metric_of_power(power_at(chain, t, dense_limit), chain.stationary(), Metric::dbar());
}

DistanceCurve tv_curve_from_sources(const ChainSpec& chain, const std::vector<std::size_t>& sources,
                                    std::size_t horizon, const std::string& chain_id) {
  DistanceCurve c;
  c.metric = Metric::tv();
  c.horizon = horizon;
  c.chain_id = chain_id;
  c.restricted = true;
  c.values.assign(horizon + 1, 0.0);
  Vector next;
  for (auto x : sources) {
    Vector mu = DistributionVector::point_mass(chain.size(), x).p;
    for (std::size_t t = 0; t <= horizon; ++t) {
      if (t > 0) {
        step(chain, mu, next);
        mu.swap(next);
      }
      c.values[t] = std::max(c.values[t], clamp01(tv_distance(mu, chain.stationary())));
    }
  }
  return c;
}

DistanceCurve separation_restricted(const ChainSpec& chain,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                    std::size_t horizon, const std::string& chain_id) {
  std::map<std::size_t, std::vector<std::size_t>> targets;
  for (auto [x, y] : pairs) targets[x].push_back(y);
  std::vector<double> min_ratio(horizon + 1, kInf);
  const Vector& pi = chain.stationary();
  Vector next;
  for (const auto& [x, ys] : targets) {
    Vector mu = DistributionVector::point_mass(chain.size(), x).p;
    for (std::size_t t = 0; t <= horizon; ++t) {
      if (t > 0) {
        step(chain, mu, next);
        mu.swap(next);
      }
      for (auto y : ys) min_ratio[t] = std::min(min_ratio[t], mu[static_cast<Eigen::Index>(y)] / pi[static_cast<Eigen::Index>(y)]);
    }
  }
  DistanceCurve c;
  c.metric = Metric::separation();
  c.horizon = horizon;
  c.chain_id = chain_id;
  c.restricted = true;
  c.values.reserve(horizon + 1);
  for (double r : min_ratio) c.values.push_back(clamp01(1.0 - r));
  return c;
}

MixingTime mixing_time(const DistanceCurve& curve, double eps) {
  for (std::size_t t = 0; t < curve.values.size(); ++t) {
    if (curve.values[t] <= eps) return {t, true};
  }
  return {curve.horizon, false};
}

MixingTime mixing_time(const ChainSpec& chain, double eps, const Metric& metric, std::size_t horizon,
                       std::size_t dense_limit) {
  KernelPowerSweep sweep(chain, dense_limit);
  for (std::size_t t = 0; t <= horizon; ++t) {
    if (t > 0) sweep.advance();
    if (metric_of_power(sweep.current(), chain.stationary(), metric) <= eps) return {t, true};
  }
  return {horizon, false};
}

}  // namespace mixlab

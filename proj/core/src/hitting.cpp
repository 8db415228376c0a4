#include "mixlab/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

std::vector<std::size_t> normalize_target(std::vector<std::size_t> target, std::size_t n) {
  if (target.empty()) throw EmptyTargetSet("target set is empty");
  std::sort(target.begin(), target.end());
  target.erase(std::unique(target.begin(), target.end()), target.end());
  if (target.back() >= n) throw InvalidArgument("target state out of range");
  return target;
}

std::vector<double> suffix_survival(const std::vector<double>& pmf, double residual) {
  std::vector<double> s(pmf.size(), 0.0);
  double acc = residual;
  for (std::size_t t = pmf.size(); t-- > 0;) {
    s[t] = acc;
    acc += pmf[t];
  }
  return s;
}

}  // namespace

double HittingDistribution::survival(std::size_t t) const {
  if (t >= pmf.size()) return residual;
  double acc = residual;
  for (std::size_t s = pmf.size(); s-- > t + 1;) acc += pmf[s];
  return acc;
}

std::vector<double> HittingDistribution::survival_curve() const { return suffix_survival(pmf, residual); }

double HittingDistribution::max_pmf() const {
  return pmf.empty() ? 0.0 : *std::max_element(pmf.begin(), pmf.end());
}

double ConvolvedHitting::survival(std::size_t t) const {
  if (t >= pmf.size()) return residual;
  double acc = residual;
  for (std::size_t s = pmf.size(); s-- > t + 1;) acc += pmf[s];
  return acc;
}

HittingResult hitting_pmf(const ChainSpec& chain, const Vector& source, std::vector<std::size_t> target,
                          const HittingOptions& options, std::string source_name) {
  const std::size_t n = chain.size();
  if (static_cast<std::size_t>(source.size()) != n) throw DimensionMismatch("source law size");
  target = normalize_target(std::move(target), n);
  std::vector<char> in(n, 0);
  for (auto z : target) in[z] = 1;

  HittingResult result;
  auto& h = result.distribution;
  h.source = std::move(source_name);
  h.target = target;
  if (options.record_profile) result.profile = AbsorptionProfile{target, {}};

  auto absorb = [&](Vector& v) {
    double mass = 0.0;
    std::vector<double> row;
    if (options.record_profile) row.reserve(target.size());
    for (auto z : target) {
      const auto zi = static_cast<Eigen::Index>(z);
      mass += v[zi];
      if (options.record_profile) row.push_back(v[zi]);
      v[zi] = 0.0;
    }
    h.pmf.push_back(mass);
    if (options.record_profile) result.profile->rows.push_back(std::move(row));
  };

  Vector alive = source;
  absorb(alive);
  const std::size_t limit = options.horizon.value_or(options.cap);
  Vector next;
  double remaining = alive.sum();
  std::size_t t = 0;
  while (t < limit && (options.horizon || remaining >= options.residual_threshold)) {
    step(chain, alive, next);
    alive.swap(next);
    absorb(alive);
    ++t;
    remaining = alive.sum();
  }
  h.horizon = t;
  h.residual = std::max(0.0, remaining);
  if (!options.horizon && h.residual >= options.residual_threshold) {
    throw HorizonCap("residual " + std::to_string(h.residual) + " after the cap of " + std::to_string(options.cap) +
                     " steps");
  }
  return result;
}

HittingResult hitting_pmf(const ChainSpec& chain, std::size_t source, std::vector<std::size_t> target,
                          const HittingOptions& options) {
  if (source >= chain.size()) throw InvalidArgument("source state out of range");
  return hitting_pmf(chain, DistributionVector::point_mass(chain.size(), source).p, std::move(target), options,
                     chain.label(source));
}

HittingDistribution hitting_distribution(const ChainSpec& chain, std::size_t source, std::vector<std::size_t> target,
                                         const HittingOptions& options) {
  return hitting_pmf(chain, source, std::move(target), options).distribution;
}

std::vector<double> convolve_pmfs(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

ConvolvedHitting convolve(const HittingDistribution& h1, const HittingDistribution& h2) {
  if (h1.target != h2.target) throw TargetMismatch("convolved hitting times must share the target set");
  const auto key = [](const HittingDistribution& h) { return std::tie(h.pmf, h.residual); };
  const bool swap = key(h2) < key(h1);
  const auto& first = swap ? h2 : h1;
  const auto& second = swap ? h1 : h2;
  ConvolvedHitting out;
  out.pmf = convolve_pmfs(first.pmf, second.pmf);
  out.residual = first.residual + second.residual - first.residual * second.residual;
  out.first = h1;
  out.second = h2;
  return out;
}

BalanceReport balanced_check(const ChainSpec& chain, std::size_t x, const std::vector<std::size_t>& target,
                             std::optional<std::size_t> horizon, double tolerance) {
  HittingOptions opts;
  opts.horizon = horizon;
  opts.record_profile = true;
  const auto result = hitting_pmf(chain, x, target, opts);
  const auto& profile = *result.profile;
  double mass = 0.0;
  for (auto z : profile.target) mass += chain.stationary()[static_cast<Eigen::Index>(z)];
  BalanceReport r;
  for (std::size_t t = 0; t < profile.rows.size(); ++t) {
    const double p = result.distribution.pmf[t];
    if (p <= 1e-12) continue;
    for (std::size_t i = 0; i < profile.target.size(); ++i) {
      const double expected = chain.stationary()[static_cast<Eigen::Index>(profile.target[i])] / mass;
      r.max_deviation = std::max(r.max_deviation, std::abs(profile.rows[t][i] / p - expected));
    }
  }
  r.balanced = r.max_deviation <= tolerance;
  return r;
}

DominanceReport stochastic_dominance(const HittingDistribution& h1, const HittingDistribution& h2, double slack) {
  const auto s1 = h1.survival_curve();
  const auto s2 = h2.survival_curve();
  const std::size_t len = std::max(s1.size(), s2.size());
  DominanceReport r;
  for (std::size_t t = 0; t < len; ++t) {
    const double a = t < s1.size() ? s1[t] : h1.residual;
    const double b = t < s2.size() ? s2[t] : h2.residual;
    r.max_violation = std::max(r.max_violation, b - a);
  }
  r.dominates = r.max_violation <= slack;
  return r;
}

bool every_path_meets(const ChainSpec& chain, std::size_t x, std::size_t y, const std::vector<std::size_t>& target) {
  std::vector<char> blocked(chain.size(), 0);
  for (auto z : target) blocked.at(z) = 1;
  if (blocked[x] || blocked[y]) return true;
  std::vector<char> seen(chain.size(), 0);
  std::deque<std::size_t> queue{x};
  seen[x] = 1;
  const auto& k = chain.kernel();
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (v == y) return false;
    for (SparseKernel::InnerIterator it(k, static_cast<Eigen::Index>(v)); it; ++it) {
      const auto w = static_cast<std::size_t>(it.col());
      if (it.value() > 0.0 && !seen[w] && !blocked[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return true;
}

PathsDecompositionReport paths_decomposition_check(const ChainSpec& chain, std::size_t x, std::size_t y,
                                                   const std::vector<std::size_t>& target,
                                                   const std::vector<std::size_t>& t_grid,
                                                   std::optional<double> t_rel) {
  if (t_grid.empty()) throw InvalidArgument("empty time grid");
  const std::size_t t_max = *std::max_element(t_grid.begin(), t_grid.end());
  for (auto s : {x, y}) {
    const auto b = balanced_check(chain, s, target, t_max);
    if (!b.balanced) {
      throw PreconditionFailed("target set is not balanced seen from " + chain.label(s) + " (deviation " +
                               std::to_string(b.max_deviation) + ")");
    }
  }
  HittingOptions opts;
  opts.horizon = t_max;
  const auto hx = hitting_distribution(chain, x, target, opts);
  const auto hy = hitting_distribution(chain, y, target, opts);
  const auto conv = convolve(hx, hy);

  const Vector& pi = chain.stationary();
  double z_mass = 0.0;
  Vector pi_z = Vector::Zero(pi.size());
  for (auto z : target) {
    z_mass += pi[static_cast<Eigen::Index>(z)];
    pi_z[static_cast<Eigen::Index>(z)] = pi[static_cast<Eigen::Index>(z)];
  }
  pi_z /= z_mass;

  // g[s] = Pr_{π_Z}(X_s ∈ Z)/π(Z); lhs[t] = P^t(x,y)/π(y).
  std::vector<double> g(t_max + 1);
  std::vector<double> lhs_all(t_max + 1);
  Vector from_z = pi_z;
  Vector from_x = DistributionVector::point_mass(chain.size(), x).p;
  Vector next;
  for (std::size_t s = 0; s <= t_max; ++s) {
    if (s > 0) {
      step(chain, from_z, next);
      from_z.swap(next);
      step(chain, from_x, next);
      from_x.swap(next);
    }
    double in_z = 0.0;
    for (auto z : target) in_z += from_z[static_cast<Eigen::Index>(z)];
    g[s] = in_z / z_mass;
    lhs_all[s] = from_x[static_cast<Eigen::Index>(y)] / pi[static_cast<Eigen::Index>(y)];
  }

  PathsDecompositionReport r;
  r.every_path_meets_target = every_path_meets(chain, x, y, target);
  r.lower_bound_slack = std::numeric_limits<double>::infinity();
  r.cdf_bound_slack = std::numeric_limits<double>::infinity();
  const double error_scale = t_rel ? 0.5 * *t_rel * *std::max_element(conv.pmf.begin(), conv.pmf.end()) *
                                         std::sqrt((1.0 - z_mass) / z_mass)
                                   : 0.0;
  if (t_rel) r.upper_bound_slack = std::numeric_limits<double>::infinity();
  for (auto t : t_grid) {
    double rhs = 0.0;
    double cdf = 0.0;
    for (std::size_t k = 0; k <= t && k < conv.pmf.size(); ++k) {
      rhs += conv.pmf[k] * g[t - k];
      cdf += conv.pmf[k];
    }
    const double lhs = lhs_all[t];
    r.times.push_back(t);
    r.lhs.push_back(lhs);
    r.rhs.push_back(rhs);
    r.convolved_cdf.push_back(cdf);
    r.lower_bound_slack = std::min(r.lower_bound_slack, lhs - rhs);
    r.cdf_bound_slack = std::min(r.cdf_bound_slack, rhs - cdf);
    r.max_identity_violation = std::max(r.max_identity_violation, std::abs(lhs - rhs));
    if (t_rel) r.upper_bound_slack = std::min(*r.upper_bound_slack, cdf + error_scale - rhs);
  }
  return r;
}

std::vector<double> geometric_convolution(const std::vector<double>& rates, std::size_t horizon) {
  std::vector<double> pmf(horizon + 1, 0.0);
  pmf[0] = 1.0;
  std::vector<double> next(horizon + 1);
  for (double beta : rates) {
    // (g ⋆ Geom(β))(t) = (1 − β)·h(t − 1) + β·g(t − 1)
    next[0] = 0.0;
    for (std::size_t t = 1; t <= horizon; ++t) next[t] = (1.0 - beta) * next[t - 1] + beta * pmf[t - 1];
    pmf.swap(next);
  }
  return pmf;
}

FillRepresentation fill_geometric_representation(const ChainSpec& bd, std::size_t horizon) {
  const std::size_t n = bd.size();
  if (n < 2) throw NotBirthDeath("need at least two states");
  const auto& k = bd.kernel();
  for (Eigen::Index x = 0; x < k.outerSize(); ++x) {
    for (SparseKernel::InnerIterator it(k, x); it; ++it) {
      if (std::abs(it.col() - x) > 1 && it.value() != 0.0) {
        throw NotBirthDeath("kernel is not tridiagonal at (" + std::to_string(x) + "," + std::to_string(it.col()) + ")");
      }
    }
  }
  if (!bd.is_lazy()) throw NotBirthDeath("chain is not lazy");

  const auto m = static_cast<Eigen::Index>(n - 1);
  Matrix s = Matrix::Zero(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    s(x, x) = bd.entry(static_cast<std::size_t>(x), static_cast<std::size_t>(x));
    if (x + 1 < m) {
      const double c = std::sqrt(k.coeff(x, x + 1) * k.coeff(x + 1, x));
      s(x, x + 1) = c;
      s(x + 1, x) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) throw ComplexEigenvalue("eigensolver failed on the killed kernel");
  const double residual =
      ((s * solver.eigenvectors()) - solver.eigenvectors() * solver.eigenvalues().asDiagonal()).cwiseAbs().maxCoeff();
  if (residual > 1e-8) throw ComplexEigenvalue("eigenpair residual " + std::to_string(residual));

  FillRepresentation out;
  for (Eigen::Index i = 0; i < m; ++i) out.rates.push_back(std::clamp(1.0 - solver.eigenvalues()[i], 0.0, 1.0));
  std::sort(out.rates.begin(), out.rates.end());
  out.pmf = geometric_convolution(out.rates, horizon);
  double total = 0.0;
  for (double p : out.pmf) total += p;
  out.residual = std::max(0.0, 1.0 - total);
  return out;
}

LogConcavityReport log_concavity_check(const std::vector<double>& pmf, double tolerance, double floor) {
  LogConcavityReport r;
  std::size_t lo = pmf.size();
  std::size_t hi = 0;
  for (std::size_t t = 0; t < pmf.size(); ++t) {
    if (pmf[t] > floor) {
      lo = std::min(lo, t);
      hi = t;
    }
  }
  if (lo == pmf.size()) {
    r.log_concave = r.unimodal = true;
    return r;
  }
  r.worst_ratio_defect = -std::numeric_limits<double>::infinity();
  for (std::size_t t = lo; t <= hi; ++t) {
    if (pmf[t] <= floor) {  // interior hole in the support
      r.worst_ratio_defect = std::numeric_limits<double>::infinity();
      r.worst_index = t;
      break;
    }
    if (t == lo || t == hi) continue;
    const double defect = (pmf[t - 1] * pmf[t + 1] - pmf[t] * pmf[t]) / (pmf[t] * pmf[t]);
    if (defect > r.worst_ratio_defect) {
      r.worst_ratio_defect = defect;
      r.worst_index = t;
    }
  }
  if (std::isinf(r.worst_ratio_defect) && r.worst_ratio_defect < 0) r.worst_ratio_defect = 0.0;
  r.log_concave = r.worst_ratio_defect <= tolerance;

  // Unimodal: no rise after the first strict fall (relative tolerance).
  bool falling = false;
  r.unimodal = true;
  for (std::size_t t = lo + 1; t <= hi; ++t) {
    const double scale = std::max(pmf[t], pmf[t - 1]);
    if (pmf[t] < pmf[t - 1] - tolerance * scale) falling = true;
    if (falling && pmf[t] > pmf[t - 1] + tolerance * scale) r.unimodal = false;
  }
  return r;
}

std::size_t tail_quantile(const HittingDistribution& h, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0,1)");
  const auto s = h.survival_curve();
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (s[t] <= p) return t;
  }
  throw HorizonCap("survival stays above " + std::to_string(p) + " through the horizon " + std::to_string(h.horizon));
}

ModeSpread mode_and_spread(const std::vector<double>& pmf) {
  ModeSpread r;
  if (pmf.empty()) return r;
  r.mode = static_cast<std::size_t>(std::max_element(pmf.begin(), pmf.end()) - pmf.begin());
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t t = 0; t < pmf.size(); ++t) {
    mass += pmf[t];
    first += static_cast<double>(t) * pmf[t];
  }
  r.mean = first / mass;
  double second = 0.0;
  for (std::size_t t = 0; t < pmf.size(); ++t) {
    const double d = static_cast<double>(t) - r.mean;
    second += d * d * pmf[t];
  }
  r.sd = std::sqrt(second / mass);
  return r;
}

}  // namespace mixlab

#include "mixlab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "mixlab/error.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mass_of(const ChainSpec& chain, const std::vector<std::size_t>& set) {
  double m = 0.0;
  for (auto x : set) m += chain.stationary()[static_cast<Eigen::Index>(x)];
  return m;
}

std::vector<char> indicator(std::size_t n, const std::vector<std::size_t>& set) {
  std::vector<char> in(n, 0);
  for (auto x : set) in.at(x) = 1;
  return in;
}

// S(x) ← Σ_y P(x,y) S(y) off the target, 0 on it: one step of Pr_x[T_Z > t].
void survival_step(const ChainSpec& chain, const std::vector<char>& in_target, Vector& s, Vector& next) {
  next.noalias() = chain.kernel() * s;
  for (std::size_t x = 0; x < in_target.size(); ++x) {
    if (in_target[x]) next[static_cast<Eigen::Index>(x)] = 0.0;
  }
  s.swap(next);
}

Vector initial_survival(const std::vector<char>& in_target) {
  Vector s(static_cast<Eigen::Index>(in_target.size()));
  for (std::size_t x = 0; x < in_target.size(); ++x) s[static_cast<Eigen::Index>(x)] = in_target[x] ? 0.0 : 1.0;
  return s;
}

double max_over(const Vector& v, const std::vector<std::size_t>& set) {
  double m = -kInf;
  for (auto x : set) m = std::max(m, v[static_cast<Eigen::Index>(x)]);
  return m;
}

double tv_from_point(const ChainSpec& chain, std::size_t x, std::size_t t) {
  return worst_tv_from(chain, x, t);
}

std::size_t first_reached(const DistanceCurve& curve, double level, const char* what) {
  const auto m = mixing_time(curve, level);
  if (!m.reached) {
    throw HorizonExceeded(std::string(what) + " not reached within " + std::to_string(curve.horizon) + " steps");
  }
  return m.steps;
}

double relaxation_of(const ChainSpec& chain) { return relaxation_time(spectrum(chain)); }

}  // namespace

CheckResult make_check(std::string check_id, std::map<std::string, double> params, double slack, double tolerance,
                       std::string note) {
  CheckResult r{std::move(check_id), std::move(params), slack, false, std::move(note)};
  r.pass = std::isfinite(slack) ? slack >= -tolerance : slack > 0.0;
  return r;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(threads, count);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

DistanceCurve curve_until(const ChainSpec& chain, const Metric& metric, double stop, std::size_t cap,
                          std::size_t dense_limit, const std::string& chain_id) {
  KernelPowerSweep sweep(chain, dense_limit);
  DistanceCurve c;
  c.metric = metric;
  c.chain_id = chain_id;
  for (;;) {
    const double v = metric_of_power(sweep.current(), chain.stationary(), metric);
    c.values.push_back(v);
    if (v <= stop || sweep.time() >= cap) break;
    sweep.advance();
  }
  c.horizon = c.values.size() - 1;
  return c;
}

// ---------------------------------------------------------------- cutoff

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::cutoff_trend: return "cutoff-trend";
    case Verdict::no_cutoff_trend: return "no-cutoff-trend";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double CutoffRow::max_ratio() const {
  double m = 0.0;
  for (double r : ratio) m = std::max(m, r);
  return m;
}

CutoffReport cutoff_sweep(const ChainBuilder& builder, const std::vector<int>& n_grid,
                          const std::vector<double>& eps_grid, const Metric& metric, const SweepOptions& options) {
  if (n_grid.empty() || eps_grid.empty()) throw InvalidArgument("cutoff sweep needs nonempty grids");
  for (double e : eps_grid) {
    if (!(e > 0.0 && e < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  }
  if (!metric.bounded()) throw InvalidArgument("cutoff sweeps use bounded metrics");
  CutoffReport report;
  report.metric = metric;
  report.n_grid = n_grid;
  report.eps_grid = eps_grid;
  report.rows.resize(n_grid.size());
  const double stop = *std::min_element(eps_grid.begin(), eps_grid.end());

  parallel_for(n_grid.size(), options.threads, [&](std::size_t i) {
    const ChainSpec chain = builder(n_grid[i]);
    const auto curve = curve_until(chain, metric, stop, options.horizon_cap, options.dense_limit);
    CutoffRow& row = report.rows[i];
    row.n = n_grid[i];
    row.states = chain.size();
    for (double e : eps_grid) {
      const auto te = first_reached(curve, e, "t(eps)");
      const auto tc = first_reached(curve, 1.0 - e, "t(1-eps)");
      row.t_eps.push_back(te);
      row.t_complement.push_back(tc);
      row.ratio.push_back(static_cast<double>(te) / static_cast<double>(std::max<std::size_t>(tc, 1)));
      row.window.push_back(static_cast<double>(te) - static_cast<double>(tc));
    }
  });
  report.verdict = classify_cutoff(report);
  report.rule =
      "heuristic: no-cutoff-trend if some eps ratio never drops more than 2% between consecutive n and is >= 1.05 "
      "at the largest n; cutoff-trend if the max-over-eps ratio never rises more than 2% and its excess over 1 "
      "shrinks to at most 70% of the first; otherwise inconclusive";
  return report;
}

Verdict classify_cutoff(const CutoffReport& report) {
  const auto& rows = report.rows;
  if (rows.size() < 2) return Verdict::inconclusive;
  for (std::size_t e = 0; e < report.eps_grid.size(); ++e) {
    bool flat = rows.back().ratio[e] >= 1.05;
    for (std::size_t k = 1; k < rows.size() && flat; ++k) flat = rows[k].ratio[e] >= rows[k - 1].ratio[e] / 1.02;
    if (flat) return Verdict::no_cutoff_trend;
  }
  bool falling = true;
  for (std::size_t k = 1; k < rows.size(); ++k) falling = falling && rows[k].max_ratio() <= rows[k - 1].max_ratio() * 1.02;
  const double first = rows.front().max_ratio() - 1.0;
  const double last = rows.back().max_ratio() - 1.0;
  if (falling && last <= 0.7 * first) return Verdict::cutoff_trend;
  return Verdict::inconclusive;
}

double precutoff_ratio(const CutoffReport& report) {
  if (report.rows.empty()) throw InvalidArgument("empty cutoff report");
  return report.rows.back().max_ratio();
}

// ---------------------------------------------------------------- profiles

std::vector<double> max_survival(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                 const std::vector<std::size_t>& sources, std::size_t horizon) {
  if (target.empty()) throw EmptyTargetSet("target set is empty");
  const auto in = indicator(chain.size(), target);
  std::vector<std::size_t> all;
  const auto* src = &sources;
  if (sources.empty()) {
    all.resize(chain.size());
    for (std::size_t x = 0; x < all.size(); ++x) all[x] = x;
    src = &all;
  }
  Vector s = initial_survival(in), next;
  std::vector<double> out;
  out.reserve(horizon + 1);
  out.push_back(max_over(s, *src));
  for (std::size_t t = 1; t <= horizon; ++t) {
    survival_step(chain, in, s, next);
    out.push_back(max_over(s, *src));
  }
  return out;
}

ProfileComparison tv_profile_vs_hitting(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                        const std::vector<std::size_t>& sources, const ProfileOptions& options) {
  if (target.empty()) throw EmptyTargetSet("target set is empty");
  ProfileComparison out;
  out.target_mass = mass_of(chain, target);
  out.hypotheses.push_back(make_check("target_mass", {{"pi_Z", out.target_mass}, {"min", options.min_target_mass}},
                                      out.target_mass - options.min_target_mass, 0.0));
  if (out.target_mass < options.min_target_mass) {
    throw PreconditionFailed("target mass " + std::to_string(out.target_mass) + " is below " +
                             std::to_string(options.min_target_mass));
  }
  const auto in = indicator(chain.size(), target);
  std::vector<std::size_t> src = sources;
  const bool worst_case = src.empty();
  if (worst_case) {
    for (std::size_t x = 0; x < chain.size(); ++x) src.push_back(x);
  }
  out.mode = worst_case ? "worst-case" : "designated-source";

  const std::size_t limit = options.horizon.value_or(options.horizon_cap);
  Vector s = initial_survival(in), next;
  std::optional<KernelPowerSweep> sweep;
  std::vector<Vector> laws, scratch;
  if (worst_case) {
    sweep.emplace(chain, options.dense_limit);
  } else {
    for (auto x : src) laws.push_back(DistributionVector::point_mass(chain.size(), x).p);
    scratch.resize(laws.size());
  }
  for (std::size_t t = 0;; ++t) {
    if (t > 0) {
      survival_step(chain, in, s, next);
      if (worst_case) {
        sweep->advance();
      } else {
        for (std::size_t i = 0; i < laws.size(); ++i) {
          step(chain, laws[i], scratch[i]);
          laws[i].swap(scratch[i]);
        }
      }
    }
    double d = 0.0;
    if (worst_case) {
      d = metric_of_power(sweep->current(), chain.stationary(), Metric::tv());
    } else {
      for (const auto& mu : laws) d = std::max(d, tv_distance(mu, chain.stationary()));
    }
    const double r = max_over(s, src);
    out.measured.push_back(d);
    out.reference.push_back(r);
    if (std::abs(d - r) > out.gap) {
      out.gap = std::abs(d - r);
      out.gap_at = t;
    }
    if (t >= limit) break;
    if (!options.horizon && d <= options.drain && r <= options.drain) break;
  }
  return out;
}

ProfileComparison sep_profile_vs_hitting(const ChainSpec& chain, const SeparationRoles& roles,
                                         const ProfileOptions& options) {
  const auto& Z = roles.target;
  if (Z.empty()) throw EmptyTargetSet("target set is empty");
  const std::size_t n = chain.size();
  const std::vector<std::size_t> A = roles.A.empty() ? std::vector<std::size_t>{roles.a} : roles.A;
  const std::vector<std::size_t> B = roles.B.empty() ? std::vector<std::size_t>{roles.b} : roles.B;
  std::vector<std::size_t> I = A;
  I.insert(I.end(), B.begin(), B.end());
  const auto inZ = indicator(n, Z);
  const auto inA = indicator(n, A);
  const auto inI = indicator(n, I);

  ProfileComparison out;
  out.mode = "pair";
  out.target_mass = mass_of(chain, Z);
  out.hypotheses.push_back(make_check("target_mass", {{"pi_Z", out.target_mass}, {"min", options.min_target_mass}},
                                      out.target_mass - options.min_target_mass, 0.0));
  if (out.target_mass < options.min_target_mass) {
    throw PreconditionFailed("hypothesis target_mass: pi(Z) = " + std::to_string(out.target_mass));
  }
  for (const auto& [name, x] : {std::pair{"balanced_from_a", roles.a}, std::pair{"balanced_from_b", roles.b}}) {
    const auto bal = balanced_check(chain, x, Z);
    out.hypotheses.push_back(make_check(name, {{"max_deviation", bal.max_deviation}}, 1e-9 - bal.max_deviation, 0.0));
    if (!bal.balanced) throw PreconditionFailed(std::string("hypothesis ") + name + " fails");
  }
  {
    // Every path from A to B must cross Z: search from A with Z removed.
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack;
    for (auto x : A) {
      if (!inZ[x]) {
        seen[x] = 1;
        stack.push_back(x);
      }
    }
    const auto& k = chain.kernel();
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (SparseKernel::InnerIterator it(k, static_cast<Eigen::Index>(x)); it; ++it) {
        const auto y = static_cast<std::size_t>(it.col());
        if (it.value() > 0.0 && !seen[y] && !inZ[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
    bool crosses = true;
    for (auto y : B) crosses = crosses && !seen[y];
    out.hypotheses.push_back(make_check("paths_through_target", {}, crosses ? 0.0 : -1.0, 0.0));
    if (!crosses) throw PreconditionFailed("hypothesis paths_through_target fails");
  }

  const auto ha = hitting_distribution(chain, roles.a, Z);
  const auto hb = hitting_distribution(chain, roles.b, Z);
  const auto conv = convolve(ha, hb);
  out.hypotheses.push_back(make_check("max_pmf_from_a", {{"value", ha.max_pmf()}}, 0.0, 0.0,
                                      "tends to zero asymptotically; reported only"));

  const std::size_t limit = options.horizon.value_or(options.horizon_cap);
  KernelPowerSweep sweep(chain, options.dense_limit);
  const Vector& pi = chain.stationary();
  Vector s = initial_survival(inZ), next;
  double dom_a = -kInf, dom_b = -kInf, pair_min = kInf;
  const auto ai = static_cast<Eigen::Index>(roles.a), bi = static_cast<Eigen::Index>(roles.b);
  for (std::size_t t = 0;; ++t) {
    if (t > 0) {
      sweep.advance();
      survival_step(chain, inZ, s, next);
    }
    const Matrix& P = sweep.current();
    const double sep = metric_of_power(P, pi, Metric::separation());
    const double ref = conv.survival(t);
    out.measured.push_back(sep);
    out.reference.push_back(ref);
    if (std::abs(sep - ref) > out.gap) {
      out.gap = std::abs(sep - ref);
      out.gap_at = t;
    }
    dom_a = std::max(dom_a, max_over(s, I) - s[ai]);
    dom_b = std::max(dom_b, max_over(s, B) - s[bi]);
    const double base = P(ai, bi) / pi[bi];
    for (std::size_t x = 0; x < n; ++x) {
      const auto xi = static_cast<Eigen::Index>(x);
      for (std::size_t y = 0; y < n; ++y) {
        const bool listed = (inA[x] && inA[y]) || !inI[x] || !inI[y];
        if (listed) pair_min = std::min(pair_min, P(xi, static_cast<Eigen::Index>(y)) / pi[static_cast<Eigen::Index>(y)] - base);
      }
    }
    if (t >= limit) break;
    if (!options.horizon && sep <= options.drain && ref <= options.drain) break;
  }
  out.hypotheses.push_back(make_check("dominance_from_a", {{"max_excess", dom_a}}, -dom_a, 1e-12,
                                      "asymptotic hypothesis; finite-n slack reported"));
  out.hypotheses.push_back(make_check("dominance_from_b", {{"max_excess", dom_b}}, -dom_b, 1e-12,
                                      "asymptotic hypothesis; finite-n slack reported"));
  out.hypotheses.push_back(make_check("pair_class_minimum", {{"min_difference", pair_min}}, pair_min, 1e-12,
                                      "asymptotic hypothesis; finite-n slack reported"));
  return out;
}

StaircaseComparison compare_staircase(const std::vector<double>& curve, double scale,
                                      const std::function<double(double)>& reference,
                                      const std::vector<double>& s_grid, const std::vector<double>& discontinuities,
                                      double guard) {
  StaircaseComparison out;
  for (double sv : s_grid) {
    bool skip = false;
    for (double d : discontinuities) skip = skip || std::abs(sv - d) < guard;
    if (skip) continue;
    const auto t = static_cast<std::size_t>(std::floor(sv * scale));
    if (t >= curve.size()) throw HorizonExceeded("staircase grid point beyond the curve horizon");
    out.s_used.push_back(sv);
    out.measured.push_back(curve[t]);
    out.expected.push_back(reference(sv));
    out.gap = std::max(out.gap, std::abs(curve[t] - out.expected.back()));
  }
  return out;
}

// ---------------------------------------------------------------- verifiers

CheckResult verify_tv_sep_chain(const ChainSpec& chain, std::size_t horizon) {
  const auto curves = distance_curves(chain, {Metric::tv(), Metric::separation()}, horizon);
  const auto& d = curves[0].values;
  const auto& sep = curves[1].values;
  double dist_slack = kInf;
  for (std::size_t t = 0; t <= horizon; ++t) {
    const double half = d[t / 2];
    const double bound = 1.0 - std::pow(1.0 - std::min(2.0 * half, 1.0), 2);
    dist_slack = std::min({dist_slack, sep[t] - d[t], bound - sep[t], 4.0 * half - bound});
  }
  double time_slack = kInf;
  for (double a : {0.05, 0.1, 0.25, 0.5}) {
    const auto tm = mixing_time(curves[0], a);
    const auto ts = mixing_time(curves[1], a);
    const auto tq = mixing_time(curves[0], a / 4.0);
    if (!(tm.reached && ts.reached && tq.reached)) continue;
    time_slack = std::min({time_slack, static_cast<double>(ts.steps) - static_cast<double>(tm.steps),
                           2.0 * static_cast<double>(tq.steps) - static_cast<double>(ts.steps)});
  }
  std::map<std::string, double> params{{"states", static_cast<double>(chain.size())},
                                       {"horizon", static_cast<double>(horizon)},
                                       {"distance_slack", dist_slack}};
  if (std::isfinite(time_slack)) params["time_slack"] = time_slack;
  return make_check("tv_sep_comparison", std::move(params), std::min(dist_slack, time_slack));
}

CheckResult verify_separation_relaxation_bound(const ChainSpec& chain, double eps, std::size_t horizon_cap) {
  if (!(eps > 0.0 && eps < 0.25)) throw InvalidArgument("eps must lie in (0, 1/4)");
  const double level = 1.0 - 2.0 * std::sqrt(eps);
  const auto sep = curve_until(chain, Metric::separation(), 1.0 - eps, horizon_cap);
  const auto tv = curve_until(chain, Metric::tv(), level, horizon_cap);
  const double t_sep = static_cast<double>(first_reached(sep, 1.0 - eps, "t_sep(1-eps)"));
  const double t_mix = static_cast<double>(first_reached(tv, level, "t_mix(1-2 sqrt eps)"));
  const double t_rel = relaxation_of(chain);
  const double rhs = 2.0 * t_mix + 2.0 * t_rel * std::log(1.0 / eps);
  return make_check("separation_relaxation_bound",
                    {{"eps", eps}, {"t_sep", t_sep}, {"t_mix", t_mix}, {"t_rel", t_rel}, {"rhs", rhs}},
                    rhs - t_sep);
}

std::vector<TimePair> sample_time_pairs(const ChainSpec& chain, Rng& rng, std::size_t count, std::size_t max_time) {
  std::vector<TimePair> out(count);
  for (auto& p : out) {
    p.x = uniform_index(rng, chain.size());
    p.y = uniform_index(rng, chain.size());
    p.s = uniform_index(rng, max_time + 1);
    p.t = uniform_index(rng, max_time + 1);
  }
  return out;
}

CheckResult verify_cauchy_schwarz_bound(const ChainSpec& chain, const std::vector<TimePair>& samples) {
  double worst = kInf;
  const Vector& pi = chain.stationary();
  const auto n = chain.size();
  for (const auto& q : samples) {
    const auto px = evolve(chain, DistributionVector::point_mass(n, q.x), q.t);
    const auto py = evolve(chain, DistributionVector::point_mass(n, q.y), q.s);
    const auto pxy = evolve(chain, px, q.s);
    const auto yi = static_cast<Eigen::Index>(q.y);
    const double lhs = pxy.p[yi] / pi[yi];
    const double rhs = std::pow(1.0 - tv_distance(px.p, py.p), 2);
    worst = std::min(worst, lhs - rhs);
  }
  return make_check("cauchy_schwarz_bound",
                    {{"states", static_cast<double>(n)}, {"samples", static_cast<double>(samples.size())}}, worst);
}

double binomial_log_pmf(std::size_t n, std::size_t k) {
  if (k > n) return -kInf;
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) - nn * std::log(2.0);
}

double binomial_tv(std::size_t t1, std::size_t t2) {
  const std::size_t top = std::max(t1, t2);
  double sum = 0.0;
  for (std::size_t k = 0; k <= top; ++k) {
    const double a = k <= t1 ? std::exp(binomial_log_pmf(t1, k)) : 0.0;
    const double b = k <= t2 ? std::exp(binomial_log_pmf(t2, k)) : 0.0;
    sum += std::abs(a - b);
  }
  return 0.5 * sum;
}

namespace {

CheckResult window_binomial_from_curve(const std::vector<double>& d, std::size_t t, std::size_t s) {
  const double lhs = d.at(t) - d.at(t + s);
  const double rhs = binomial_tv(t, t + s);
  return make_check("binomial_window", {{"t", static_cast<double>(t)}, {"s", static_cast<double>(s)},
                                        {"lhs", lhs}, {"rhs", rhs}},
                    rhs - lhs);
}

}  // namespace

CheckResult verify_window_binomial(const ChainSpec& chain, std::size_t t, std::size_t s) {
  if (!chain.is_lazy()) throw NotLazy("the binomial window bound needs a lazy chain");
  const auto curve = distance_curve(chain, Metric::tv(), t + s);
  return window_binomial_from_curve(curve.values, t, s);
}

CheckResult binomial_window_half(std::size_t t, double c) {
  const auto shift = static_cast<std::size_t>(std::floor(c * std::sqrt(static_cast<double>(t))));
  const double tv = binomial_tv(t, t + shift);
  return make_check("binomial_window_half", {{"t", static_cast<double>(t)}, {"c", c}, {"tv", tv}}, 0.5 - tv);
}

std::vector<CheckResult> lp_mixing_comparison(const ChainSpec& chain, const std::vector<double>& p_list,
                                              const std::vector<double>& a_list, std::size_t horizon_cap) {
  std::vector<CheckResult> out;
  for (double p : p_list) {
    if (!(p > 1.0)) throw InvalidArgument("p must exceed 1");
    for (double a : a_list) {
      if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("a must lie in (0, 1]");
      const bool upper_branch = p >= 2.0;
      const double m = upper_branch ? 1.0 : std::ceil(p / (2.0 * (p - 1.0)));
      const double l2_small = upper_branch ? a : std::pow(a, m);
      const auto c2 = curve_until(chain, Metric::lp(2.0), l2_small, horizon_cap);
      const auto cp = curve_until(chain, Metric::lp(p), a, horizon_cap);
      const double tp = static_cast<double>(first_reached(cp, a, "t_lp(a)"));
      double lower = 0.0, upper = 0.0;
      std::map<std::string, double> params{{"p", p}, {"a", a}, {"t_lp", tp}};
      if (upper_branch) {
        const double t2 = static_cast<double>(first_reached(c2, a, "t_l2(a)"));
        const double t2r = static_cast<double>(first_reached(c2, std::sqrt(a), "t_l2(sqrt a)"));
        lower = tp - t2;
        upper = 2.0 * t2r - tp;
        params["t_l2"] = t2;
        params["t_l2_sqrt"] = t2r;
      } else {
        const double t2 = static_cast<double>(first_reached(c2, a, "t_l2(a)"));
        const double t2m = static_cast<double>(first_reached(c2, std::pow(a, m), "t_l2(a^m)"));
        lower = tp - t2m / m;
        upper = t2 - tp;
        params["t_l2"] = t2;
        params["t_l2_power"] = t2m;
        params["m_p"] = m;
      }
      params["lower_slack"] = lower;
      params["upper_slack"] = upper;
      out.push_back(make_check("lp_comparison", std::move(params), std::min(lower, upper)));
    }
  }
  return out;
}

SandwichReport hit_vs_mix_sandwich(const ChainSpec& chain, std::size_t x, const std::vector<std::size_t>& target,
                                   double p, double eps) {
  if (!(p > 0.0 && p < 1.0 && eps > 0.0 && eps < 1.0)) throw InvalidArgument("p and eps must lie in (0, 1)");
  SandwichReport r;
  r.target_mass = mass_of(chain, target);
  if (!(r.target_mass > 0.0 && r.target_mass < 1.0)) throw PreconditionFailed("target must be a proper subset");
  const auto h = hitting_distribution(chain, x, target);
  r.t_hit = tail_quantile(h, p);
  r.t_rel = relaxation_of(chain);
  const double rest = 1.0 - r.target_mass;
  const double s_raw = std::ceil(r.t_rel * std::log(rest / eps) / r.target_mass);
  const double r_raw = std::ceil(r.t_rel * std::log(rest / (r.target_mass * eps * eps)) / 2.0);
  r.s_eps = static_cast<std::size_t>(std::max(0.0, s_raw));
  r.r_eps = static_cast<std::size_t>(std::max(0.0, r_raw));

  std::map<std::string, double> common{{"p", p}, {"eps", eps}, {"t_hit", static_cast<double>(r.t_hit)},
                                       {"t_rel", r.t_rel}, {"pi_Z", r.target_mass}};
  if (eps >= p) {
    r.lower = make_check("hit_vs_mix_lower", common, 0.0, 0.0, "vacuous: eps >= p");
  } else {
    const std::size_t s_prime = r.t_hit > r.s_eps ? r.t_hit - r.s_eps : 0;
    const double tv = tv_from_point(chain, x, s_prime);
    auto params = common;
    params["s_eps"] = static_cast<double>(r.s_eps);
    params["tv"] = tv;
    r.lower = make_check("hit_vs_mix_lower", std::move(params), tv - (p - eps));
  }
  const auto bal = balanced_check(chain, x, target);
  if (!bal.balanced) throw PreconditionFailed("target is not balanced seen from the start state");
  const double tv = tv_from_point(chain, x, r.t_hit + r.r_eps);
  auto params = common;
  params["r_eps"] = static_cast<double>(r.r_eps);
  params["tv"] = tv;
  r.upper = make_check("hit_vs_mix_upper", std::move(params), p + eps - tv);
  return r;
}

CheckResult verify_stationary_tail(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                   std::size_t horizon, double t_rel) {
  const auto survival = stationary_start_survival(chain, target, horizon);
  const double m = mass_of(chain, target);
  double worst = kInf;
  for (std::size_t t = 0; t <= horizon; ++t) {
    const double rhs = (1.0 - m) * std::exp(-static_cast<double>(t) * m / t_rel);
    worst = std::min(worst, rhs - survival[t]);
  }
  return make_check("stationary_tail", {{"pi_A", m}, {"t_rel", t_rel}, {"horizon", static_cast<double>(horizon)}},
                    worst);
}

CheckResult verify_cheeger_sandwich(const ChainSpec& chain) {
  const auto summary = eigen_summary(chain);
  const auto ce = cheeger_exact(chain);
  const double phi = ce.exact.value();
  const double gap = 1.0 - summary.lambda2;
  return make_check("cheeger_sandwich",
                    {{"states", static_cast<double>(chain.size())}, {"phi", phi}, {"gap", gap}},
                    std::min(gap - phi * phi / 2.0, 2.0 * phi - gap));
}

CheckResult verify_l2_contraction(const ChainSpec& chain, std::size_t horizon) {
  const auto summary = eigen_summary(chain);
  double worst = kInf;
  for (std::size_t x = 0; x < chain.size(); ++x) {
    worst = std::min(worst, l2_contraction_slack(chain, DistributionVector::point_mass(chain.size(), x).p, horizon,
                                                 summary));
  }
  return make_check("l2_contraction", {{"states", static_cast<double>(chain.size())}}, worst);
}

CheckResult verify_fill_representation(const ChainSpec& bd_chain, double residual) {
  HittingOptions opts;
  opts.residual_threshold = residual;
  const auto h = hitting_distribution(bd_chain, 0, {bd_chain.size() - 1}, opts);
  const auto fill = fill_geometric_representation(bd_chain, h.horizon);
  double worst = 0.0;
  for (std::size_t t = 0; t <= h.horizon; ++t) worst = std::max(worst, std::abs(fill.pmf[t] - h.pmf[t]));
  return make_check("fill_representation",
                    {{"states", static_cast<double>(bd_chain.size())}, {"horizon", static_cast<double>(h.horizon)},
                     {"max_difference", worst}},
                    1e-8 - worst, 0.0);
}

// ---------------------------------------------------------------- window one

WindowOneReport window_one_analysis(const GraphChain& gc, double delta) {
  WindowOneReport r;
  r.n = gc.n;
  r.L = gc.L;
  const auto pm = bd_projection(gc);
  r.levels = pm.chain.size();
  const auto h = hitting_distribution(pm.chain, 0, {r.levels - 1});
  r.single = h.pmf;
  r.convolved = convolve_pmfs(h.pmf, h.pmf);
  r.concavity = log_concavity_check(r.convolved);
  r.checks.push_back(make_check("window_log_concavity", {{"worst_ratio_defect", r.concavity.worst_ratio_defect}},
                                -r.concavity.worst_ratio_defect));
  if (!r.concavity.log_concave) throw PreconditionFailed("projected convolved hitting law is not log-concave");
  r.spread = mode_and_spread(r.convolved);
  while (r.support_start < r.convolved.size() && r.convolved[r.support_start] <= 0.0) ++r.support_start;
  const auto back = static_cast<std::size_t>(std::floor(delta * gc.n));
  r.growth_end = r.spread.mode > back ? r.spread.mode - back : 0;
  r.alpha = kInf;
  for (std::size_t t = r.support_start; t < r.growth_end; ++t) {
    r.alpha = std::min(r.alpha, r.convolved[t + 1] / r.convolved[t]);
  }
  r.target_mass = mass_of(gc.chain, gc.role("Z'"));
  for (std::size_t t = r.spread.mode + 1; t < r.convolved.size(); ++t) r.survival_at_mode += r.convolved[t];
  r.survival_at_mode += h.residual;

  const bool has_range = r.growth_end > r.support_start;
  CheckResult growth = make_check(
      "window_growth_ratio",
      {{"alpha", has_range ? r.alpha : 0.0}, {"delta", delta}, {"growth_end", static_cast<double>(r.growth_end)},
       {"lower_bound_at_end", has_range ? r.convolved[r.growth_end] / r.target_mass : 0.0}},
      has_range ? r.alpha - 1.0 : -1.0, 0.0, has_range ? "" : "empty growth range");
  growth.pass = has_range && r.alpha > 1.0;
  r.checks.push_back(std::move(growth));
  r.checks.push_back(make_check("window_mode_mean",
                                {{"mode", static_cast<double>(r.spread.mode)}, {"mean", r.spread.mean},
                                 {"sd", r.spread.sd}},
                                4.0 * r.spread.sd - std::abs(static_cast<double>(r.spread.mode) - r.spread.mean)));
  return r;
}

WindowOneReport window_one_analysis(int n, int L, std::uint64_t seed, double delta,
                                    const GraphExampleOptions& options) {
  return window_one_analysis(example5(n, L, seed, options), delta);
}

// ---------------------------------------------------------------- suite

bool SuiteReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<std::string> suite_check_ids() {
  return {"tv_sep_comparison", "lp_comparison",     "cauchy_schwarz_bound", "stationary_tail",
          "separation_relaxation_bound", "cheeger_sandwich", "binomial_window", "binomial_window_half",
          "l2_contraction",    "hit_vs_mix_lower",  "hit_vs_mix_upper",     "fill_representation"};
}

std::vector<CheckSummary> summarize(const std::vector<CheckResult>& results) {
  std::vector<CheckSummary> out;
  for (const auto& r : results) {
    auto it = std::find_if(out.begin(), out.end(), [&](const CheckSummary& s) { return s.check_id == r.check_id; });
    if (it == out.end()) {
      out.push_back({r.check_id, 0, 0, kInf});
      it = std::prev(out.end());
    }
    ++it->count;
    if (!r.pass) ++it->failures;
    it->worst_slack = std::min(it->worst_slack, r.slack);
  }
  return out;
}

SuiteReport run_verify_suite(const SuiteOptions& o) {
  const auto wanted = [&](const std::string& id) {
    if (o.only.empty()) return true;
    return std::any_of(o.only.begin(), o.only.end(),
                       [&](const std::string& f) { return f == "all" || id.find(f) != std::string::npos; });
  };
  const auto states_in = [](Rng& rng, std::size_t hi) { return 2 + uniform_index(rng, hi - 1); };

  std::vector<std::vector<CheckResult>> per_chain(o.chains);
  parallel_for(o.chains, o.threads, [&](std::size_t i) {
    auto& out = per_chain[i];
    const std::string tag = std::to_string(i);
    Rng rng = make_stream(o.seed, "suite/chain/" + tag);
    const ChainSpec chain = random_reversible_lazy(states_in(rng, o.max_states), rng);
    auto params_tag = [&](CheckResult c) {
      c.params["chain"] = static_cast<double>(i);
      out.push_back(std::move(c));
    };
    if (wanted("tv_sep_comparison")) params_tag(verify_tv_sep_chain(chain, o.horizon));
    if (wanted("lp_comparison")) {
      for (auto& c : lp_mixing_comparison(chain, {1.5, 4.0, kInf}, {0.5, 0.25})) params_tag(std::move(c));
    }
    if (wanted("cauchy_schwarz_bound")) {
      Rng pairs = make_stream(o.seed, "suite/pairs/" + tag);
      params_tag(verify_cauchy_schwarz_bound(chain, sample_time_pairs(chain, pairs, 25, 100)));
    }
    const bool sandwich = wanted("hit_vs_mix_lower") || wanted("hit_vs_mix_upper");
    const bool need_rel = wanted("stationary_tail") || sandwich;
    const double t_rel = need_rel ? relaxation_of(chain) : 0.0;
    if (wanted("stationary_tail")) {
      Rng pick = make_stream(o.seed, "suite/subset/" + tag);
      std::vector<std::size_t> idx(chain.size());
      for (std::size_t x = 0; x < idx.size(); ++x) idx[x] = x;
      shuffle(idx, pick);
      idx.resize(1 + uniform_index(pick, chain.size() - 1));
      std::sort(idx.begin(), idx.end());
      params_tag(verify_stationary_tail(chain, idx, o.horizon, t_rel));
    }
    if (wanted("separation_relaxation_bound")) params_tag(verify_separation_relaxation_bound(chain, 0.04));
    if (wanted("cheeger_sandwich")) {
      Rng small = make_stream(o.seed, "suite/cheeger/" + tag);
      params_tag(verify_cheeger_sandwich(random_reversible_lazy(states_in(small, o.cheeger_max_states), small)));
    }
    if (wanted("binomial_window") || wanted("binomial_window_half") || wanted("l2_contraction")) {
      const auto d = distance_curve(chain, Metric::tv(), o.horizon).values;
      const auto quarter = std::find_if(d.begin(), d.end(), [](double v) { return v <= 0.25; }) - d.begin();
      const auto tq = static_cast<std::size_t>(std::min<std::ptrdiff_t>(quarter, static_cast<std::ptrdiff_t>(o.horizon / 2)));
      if (wanted("binomial_window")) {
        for (std::size_t t : {std::size_t{0}, std::size_t{5}, tq}) {
          const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(t))));
          for (std::size_t s : {std::size_t{0}, std::size_t{1}, root}) {
            if (t + s <= o.horizon) params_tag(window_binomial_from_curve(d, t, s));
          }
        }
      }
      if (wanted("binomial_window_half")) params_tag(binomial_window_half(tq));
      if (wanted("l2_contraction")) params_tag(verify_l2_contraction(chain, o.horizon));
    }
    if (sandwich) {
      Rng pick = make_stream(o.seed, "suite/sandwich/" + tag);
      const auto x = uniform_index(pick, chain.size());
      auto z = uniform_index(pick, chain.size() - 1);
      if (z >= x) ++z;
      const auto rep = hit_vs_mix_sandwich(chain, x, {z}, 0.25, 0.05);
      if (wanted("hit_vs_mix_lower")) params_tag(rep.lower);
      if (wanted("hit_vs_mix_upper")) params_tag(rep.upper);
    }
  });

  std::vector<std::vector<CheckResult>> per_bd(wanted("fill_representation") ? o.bd_chains : 0);
  parallel_for(per_bd.size(), o.threads, [&](std::size_t i) {
    Rng rng = make_stream(o.seed, "suite/bd/" + std::to_string(i));
    auto c = verify_fill_representation(random_lazy_birth_death(states_in(rng, o.bd_max_states), rng));
    c.params["chain"] = static_cast<double>(i);
    per_bd[i].push_back(std::move(c));
  });

  SuiteReport report;
  for (auto* group : {&per_chain, &per_bd}) {
    for (auto& v : *group) {
      for (auto& c : v) report.results.push_back(std::move(c));
    }
  }
  report.summary = summarize(report.results);
  return report;
}

SparseKernel inject_fault(const SparseKernel& kernel, Rng& rng, double amount) {
  Matrix p(kernel);
  const auto n = p.rows();
  if (n < 3) throw InvalidArgument("fault injection needs at least three states");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> zero, live;
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      if (x == y) continue;
      (p(x, y) == 0.0 ? zero : live).emplace_back(x, y);
    }
  }
  // A one-sided entry breaks detailed balance outright; otherwise any edge
  // of a cycle does, and with no zero pair every edge lies on a triangle.
  const auto& pool = zero.empty() ? live : zero;
  const auto [x, y] = pool[uniform_index(rng, pool.size())];
  p(x, y) += amount;
  p.row(x) /= p.row(x).sum();
  return p.sparseView();
}

}  // namespace mixlab

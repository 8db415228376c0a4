#include "mixlab/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "mixlab/distance.hpp"
#include "mixlab/error.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dense(const ChainSpec& chain, std::size_t limit) {
  if (chain.size() > limit) {
    throw DenseLimitExceeded(std::to_string(chain.size()) + " states exceed the dense eigensolver limit " +
                             std::to_string(limit));
  }
}

}  // namespace

double SpectralSummary::absolute_gap() const { return 1.0 - std::max(lambda2, std::abs(lambda_min)); }

Matrix symmetrized_kernel(const ChainSpec& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Matrix s = Matrix::Zero(n, n);
  const auto& k = chain.kernel();
  for (Eigen::Index x = 0; x < k.outerSize(); ++x) {
    for (SparseKernel::InnerIterator it(k, x); it; ++it) {
      s(x, it.col()) = it.col() == x ? it.value() : std::sqrt(it.value() * k.coeff(it.col(), x));
    }
  }
  return s;
}

double relaxation_time(const std::vector<double>& ev) {
  if (ev.size() < 2) return kInf;
  const double gap = 1.0 - std::max(ev[1], std::abs(ev.back()));
  return gap > 0.0 ? 1.0 / gap : kInf;
}

std::vector<double> spectrum(const ChainSpec& chain, std::size_t dense_limit) {
  require_dense(chain, dense_limit);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized_kernel(chain), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw EigenSolverFailure("symmetric eigensolver did not converge");
  std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

SpectralSummary eigen_summary(const ChainSpec& chain, std::size_t dense_limit) {
  require_dense(chain, dense_limit);
  const Matrix s = symmetrized_kernel(chain);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) throw EigenSolverFailure("symmetric eigensolver did not converge");
  const Vector& values = solver.eigenvalues();  // ascending
  const Matrix& vectors = solver.eigenvectors();
  const Eigen::Index n = s.rows();

  SpectralSummary out;
  out.eigenvalues.assign(values.data(), values.data() + n);
  std::reverse(out.eigenvalues.begin(), out.eigenvalues.end());
  out.max_residual = ((s * vectors) - vectors * values.asDiagonal()).cwiseAbs().maxCoeff();
  if (out.max_residual > 1e-6) {
    throw EigenSolverFailure("eigenpair residual " + std::to_string(out.max_residual) + " above 1e-6");
  }
  if (std::abs(out.eigenvalues.front() - 1.0) > 1e-9) {
    throw EigenSolverFailure("top eigenvalue " + std::to_string(out.eigenvalues.front()) + " differs from 1");
  }
  out.lambda_min = out.eigenvalues.back();
  if (n == 1) {
    out.lambda2 = out.eigenvalues.front();
    out.second_right_eigenvector = Vector::Ones(1);
    return out;
  }
  out.lambda2 = out.eigenvalues[1];
  out.t_rel = relaxation_time(out.eigenvalues);
  Vector f = vectors.col(n - 2).array() / chain.stationary().array().sqrt();
  const double scale = f.cwiseAbs().maxCoeff();
  out.second_right_eigenvector = scale > 0.0 ? Vector(f / scale) : f;
  return out;
}

double set_conductance(const ChainSpec& chain, const std::vector<std::size_t>& set) {
  std::vector<char> in(chain.size(), 0);
  for (auto x : set) in.at(x) = 1;
  const Vector& pi = chain.stationary();
  double mass = 0.0;
  double flow = 0.0;
  const auto& k = chain.kernel();
  for (auto x : set) {
    mass += pi[static_cast<Eigen::Index>(x)];
    for (SparseKernel::InnerIterator it(k, static_cast<Eigen::Index>(x)); it; ++it) {
      if (!in[static_cast<std::size_t>(it.col())]) flow += pi[static_cast<Eigen::Index>(x)] * it.value();
    }
  }
  if (mass <= 0.0) throw InvalidArgument("conductance of an empty set");
  return flow / mass;
}

CheegerEstimate cheeger_exact(const ChainSpec& chain, std::size_t max_states) {
  const std::size_t n = chain.size();
  if (n > max_states) {
    throw TooLargeForExact(std::to_string(n) + " states; exact enumeration supports at most " +
                           std::to_string(max_states));
  }
  if (n < 2) throw InvalidArgument("Cheeger constant needs at least two states");
  const Vector& pi = chain.stationary();
  Matrix flow = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto& k = chain.kernel();
  for (Eigen::Index x = 0; x < k.outerSize(); ++x) {
    for (SparseKernel::InnerIterator it(k, x); it; ++it) {
      if (it.col() != x) flow(x, it.col()) = pi[x] * it.value();
    }
  }

  // Gray-code walk over all subsets; Q and π(A) updated one vertex at a time.
  std::vector<char> in(n, 0);
  double q = 0.0;
  double mass = 0.0;
  double best = kInf;
  std::uint64_t best_code = 0;
  std::uint64_t code = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const auto v = static_cast<std::size_t>(std::countr_zero(i));
    const auto vi = static_cast<Eigen::Index>(v);
    double inside = 0.0;
    double outside = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == v) continue;
      (in[y] ? inside : outside) += flow(vi, static_cast<Eigen::Index>(y));
    }
    if (in[v]) {
      in[v] = 0;
      mass -= pi[vi];
      q += inside - outside;
    } else {
      in[v] = 1;
      mass += pi[vi];
      q += outside - inside;
    }
    code ^= std::uint64_t{1} << v;
    if (mass > 0.0 && mass <= 0.5 + 1e-12) {
      const double phi = q / mass;
      if (phi < best) {
        best = phi;
        best_code = code;
      }
    }
  }

  CheegerEstimate est;
  for (std::size_t x = 0; x < n; ++x) {
    if (best_code >> x & 1U) est.witness_set.push_back(x);
  }
  const double exact = set_conductance(chain, est.witness_set);
  est.exact = exact;
  est.upper = exact;
  est.lower = exact;
  return est;
}

CheegerEstimate cheeger_bounds(const ChainSpec& chain, const SpectralSummary& summary) {
  const std::size_t n = chain.size();
  CheegerEstimate est;
  est.lower = (1.0 - summary.lambda2) / 2.0;
  if (n < 2) return est;
  const Vector& f = summary.second_right_eigenvector;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return f[static_cast<Eigen::Index>(a)] < f[static_cast<Eigen::Index>(b)];
  });

  const Vector& pi = chain.stationary();
  const auto& k = chain.kernel();
  std::vector<char> in(n, 0);
  double q = 0.0;
  double mass = 0.0;
  double best = kInf;
  std::size_t best_prefix = 0;
  bool best_is_prefix = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto v = static_cast<Eigen::Index>(order[i]);
    for (SparseKernel::InnerIterator it(k, v); it; ++it) {
      if (it.col() == v) continue;
      const double c = pi[v] * it.value();
      q += in[static_cast<std::size_t>(it.col())] ? -c : c;
    }
    in[order[i]] = 1;
    mass += pi[v];
    const double small = std::min(mass, 1.0 - mass);
    if (small <= 0.0) continue;
    const double phi = q / small;
    if (phi < best) {
      best = phi;
      best_prefix = i + 1;
      best_is_prefix = mass <= 0.5;
    }
  }
  if (best_is_prefix) {
    est.witness_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_prefix));
  } else {
    est.witness_set.assign(order.begin() + static_cast<std::ptrdiff_t>(best_prefix), order.end());
  }
  std::sort(est.witness_set.begin(), est.witness_set.end());
  est.upper = set_conductance(chain, est.witness_set);
  return est;
}

CheegerEstimate cheeger_bounds(const ChainSpec& chain, std::size_t dense_limit) {
  return cheeger_bounds(chain, eigen_summary(chain, dense_limit));
}

double l2_contraction_bound(const ChainSpec& chain, const Vector& mu, std::size_t t,
                            const SpectralSummary& summary) {
  const double lambda = std::max(summary.lambda2, std::abs(summary.lambda_min));
  const double norm = lp_distance(mu, chain.stationary(), chain.stationary(), 2.0);
  return std::pow(lambda, static_cast<double>(t)) * norm;
}

double l2_contraction_slack(const ChainSpec& chain, const Vector& mu, std::size_t t_max,
                            const SpectralSummary& summary) {
  double worst = kInf;
  Vector cur = mu;
  Vector next;
  for (std::size_t t = 0; t <= t_max; ++t) {
    if (t > 0) {
      step(chain, cur, next);
      cur.swap(next);
    }
    const double lhs = 2.0 * tv_distance(cur, chain.stationary());
    worst = std::min(worst, l2_contraction_bound(chain, mu, t, summary) - lhs);
  }
  return worst;
}

std::vector<double> stationary_start_survival(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                              std::size_t t_max) {
  if (target.empty()) throw EmptyTargetSet("target set is empty");
  std::vector<char> in(chain.size(), 0);
  for (auto x : target) in.at(x) = 1;
  Vector alive = chain.stationary();
  for (std::size_t x = 0; x < chain.size(); ++x) {
    if (in[x]) alive[static_cast<Eigen::Index>(x)] = 0.0;
  }
  std::vector<double> survival;
  survival.reserve(t_max + 1);
  survival.push_back(alive.sum());
  Vector next;
  for (std::size_t t = 1; t <= t_max; ++t) {
    step(chain, alive, next);
    for (std::size_t x = 0; x < chain.size(); ++x) {
      if (in[x]) next[static_cast<Eigen::Index>(x)] = 0.0;
    }
    alive.swap(next);
    survival.push_back(alive.sum());
  }
  return survival;
}

TailComparison hitting_from_stationary_tail(const ChainSpec& chain, const std::vector<std::size_t>& target,
                                            std::size_t t, double t_rel) {
  const auto survival = stationary_start_survival(chain, target, t);
  double mass = 0.0;
  for (auto x : target) mass += chain.stationary()[static_cast<Eigen::Index>(x)];
  TailComparison out;
  out.lhs = survival.back();
  out.rhs = (1.0 - mass) * std::exp(-static_cast<double>(t) * mass / t_rel);
  return out;
}

ProductConditionReport product_condition_report(std::vector<ProductConditionEntry> sweep) {
  ProductConditionReport r;
  std::sort(sweep.begin(), sweep.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  r.entries = std::move(sweep);
  r.note = "heuristic: growing iff t_mix/t_rel rises by >= 1.5x from smallest to largest n";
  if (r.entries.size() >= 2) {
    r.growth = r.entries.back().product() / r.entries.front().product();
    r.growing = r.growth >= 1.5;
  }
  return r;
}

}  // namespace mixlab

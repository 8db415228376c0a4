#include "mixlab/chain.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

std::vector<char> reachable(const SparseKernel& kernel, bool transpose) {
  const auto n = static_cast<std::size_t>(kernel.rows());
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (Eigen::Index x = 0; x < kernel.outerSize(); ++x) {
    for (SparseKernel::InnerIterator it(kernel, x); it; ++it) {
      if (it.value() <= 0.0 || it.col() == x) continue;
      const auto from = static_cast<std::size_t>(transpose ? it.col() : x);
      const auto to = static_cast<std::size_t>(transpose ? x : it.col());
      adjacency[from].push_back(to);
    }
  }
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (auto y : adjacency[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        queue.push_back(y);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<std::size_t> ChainSpec::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ChainSpec::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw InvalidArgument("unknown state label '" + std::string(label) + "'");
}

void KernelBuilder::add(std::size_t x, std::size_t y, double p) {
  if (p == 0.0) return;
  entries_.emplace_back(static_cast<int>(x), static_cast<int>(y), p);
}

SparseKernel KernelBuilder::build() const {
  SparseKernel k(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  k.setFromTriplets(entries_.begin(), entries_.end());
  k.makeCompressed();
  return k;
}

Vector stationary_distribution(const SparseKernel& kernel, double tolerance) {
  const auto n = static_cast<std::size_t>(kernel.rows());
  if (n == 0) throw InvalidArgument("empty kernel");
  const auto forward = reachable(kernel, false);
  const auto backward = reachable(kernel, true);
  for (std::size_t x = 0; x < n; ++x) {
    if (!forward[x] || !backward[x]) {
      throw NotIrreducible("state " + std::to_string(x) + " is not in the communicating class of state 0");
    }
  }

  Vector pi = Vector::Zero(static_cast<Eigen::Index>(n));
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  pi[0] = 1.0;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (SparseKernel::InnerIterator it(kernel, static_cast<Eigen::Index>(x)); it; ++it) {
      const auto y = static_cast<std::size_t>(it.col());
      if (y == x || it.value() <= 0.0 || seen[y]) continue;
      const double back = kernel.coeff(it.col(), static_cast<Eigen::Index>(x));
      if (back <= 0.0) {
        throw NotReversible("P(" + std::to_string(x) + "," + std::to_string(y) + ") > 0 but the reverse entry is 0");
      }
      pi[it.col()] = pi[static_cast<Eigen::Index>(x)] * it.value() / back;
      seen[y] = 1;
      queue.push_back(y);
    }
  }
  pi /= pi.sum();

  for (Eigen::Index x = 0; x < kernel.outerSize(); ++x) {
    for (SparseKernel::InnerIterator it(kernel, x); it; ++it) {
      if (it.col() == x) continue;
      const double flow = pi[x] * it.value();
      const double reverse = pi[it.col()] * kernel.coeff(it.col(), x);
      if (std::abs(flow - reverse) > tolerance * std::max(flow, reverse)) {
        std::ostringstream msg;
        msg << "detailed balance fails on (" << x << "," << it.col() << "): " << flow << " vs " << reverse;
        throw NotReversible(msg.str());
      }
    }
  }
  return pi;
}

Vector stationary_from_weights(const Vector& weights) {
  if (weights.size() == 0) throw InvalidArgument("empty weight vector");
  if ((weights.array() <= 0.0).any()) throw ZeroStationaryMass("weights must be strictly positive");
  return weights / weights.sum();
}

ChainSpec build_chain(SparseKernel kernel, std::vector<std::string> labels, const ChainOptions& options) {
  if (kernel.rows() != kernel.cols()) throw DimensionMismatch("kernel must be square");
  const auto n = static_cast<std::size_t>(kernel.rows());
  if (n == 0) throw InvalidArgument("kernel has no states");
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw DimensionMismatch("label count differs from kernel size");
  kernel.prune(0.0);
  kernel.makeCompressed();

  double floor = 1.0;
  for (Eigen::Index x = 0; x < kernel.outerSize(); ++x) {
    double sum = 0.0;
    for (SparseKernel::InnerIterator it(kernel, x); it; ++it) {
      if (!(it.value() >= 0.0 && it.value() <= 1.0 + options.row_tolerance)) {
        throw NonStochasticRow("entry (" + std::to_string(x) + "," + std::to_string(it.col()) + ") outside [0,1]");
      }
      sum += it.value();
    }
    if (std::abs(sum - 1.0) > options.row_tolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << x << " sums to " << sum;
      throw NonStochasticRow(msg.str());
    }
    floor = std::min(floor, kernel.coeff(x, x));
  }
  if (options.require_lazy && floor < 0.5 - 1e-12) {
    throw NotLazy("minimum holding probability " + std::to_string(floor) + " < 1/2");
  }

  ChainSpec chain;
  chain.pi_ = stationary_distribution(kernel, options.reversibility_tolerance);
  chain.kernel_ = std::move(kernel);
  chain.laziness_floor_ = floor;
  chain.states_ = std::move(labels);
  for (std::size_t i = 0; i < n; ++i) {
    if (!chain.index_.emplace(chain.states_[i], i).second) {
      throw InvalidArgument("duplicate state label '" + chain.states_[i] + "'");
    }
  }
  return chain;
}

ChainSpec build_chain(const Matrix& kernel, std::vector<std::string> labels, const ChainOptions& options) {
  if (kernel.rows() != kernel.cols()) throw DimensionMismatch("kernel must be square");
  SparseKernel sparse = kernel.sparseView();
  return build_chain(std::move(sparse), std::move(labels), options);
}

DistributionVector DistributionVector::point_mass(std::size_t n, std::size_t x) {
  DistributionVector d;
  d.p = Vector::Zero(static_cast<Eigen::Index>(n));
  d.p[static_cast<Eigen::Index>(x)] = 1.0;
  return d;
}

DistributionVector DistributionVector::from_vector(Vector p) {
  if ((p.array() < 0.0).any()) throw InvalidArgument("distribution has negative entries");
  if (std::abs(p.sum() - 1.0) > 1e-12) throw InvalidArgument("distribution does not sum to 1");
  DistributionVector d;
  d.p = std::move(p);
  return d;
}

void step(const ChainSpec& chain, const Vector& mu, Vector& out) {
  const auto& k = chain.kernel();
  out.setZero(k.cols());
  for (Eigen::Index x = 0; x < k.outerSize(); ++x) {
    const double m = mu[x];
    if (m == 0.0) continue;
    for (SparseKernel::InnerIterator it(k, x); it; ++it) out[it.col()] += m * it.value();
  }
}

DistributionVector evolve(const ChainSpec& chain, const DistributionVector& start, std::size_t t) {
  if (static_cast<std::size_t>(start.p.size()) != chain.size()) throw DimensionMismatch("start vector size");
  DistributionVector cur = start;
  Vector next;
  for (std::size_t s = 0; s < t; ++s) {
    step(chain, cur.p, next);
    cur.p.swap(next);
  }
  cur.time = start.time + t;
  return cur;
}

void multiply_by_kernel(const Matrix& in, const SparseKernel& kernel, Matrix& out) {
  out.setZero(in.rows(), kernel.cols());
  for (Eigen::Index k = 0; k < kernel.outerSize(); ++k) {
    for (SparseKernel::InnerIterator it(kernel, k); it; ++it) {
      out.col(it.col()).noalias() += it.value() * in.col(k);
    }
  }
}

KernelPowerSweep::KernelPowerSweep(const ChainSpec& chain, std::size_t dense_limit) : chain_(&chain) {
  if (chain.size() > dense_limit) {
    throw DenseLimitExceeded(std::to_string(chain.size()) + " states exceed the dense limit of " +
                             std::to_string(dense_limit) + "; use designated-pair mode");
  }
  power_ = Matrix::Identity(static_cast<Eigen::Index>(chain.size()), static_cast<Eigen::Index>(chain.size()));
}

void KernelPowerSweep::advance() {
  multiply_by_kernel(power_, chain_->kernel(), scratch_);
  power_.swap(scratch_);
  ++time_;
}

}  // namespace mixlab

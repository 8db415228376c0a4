#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mixlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseKernel = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultDenseLimit = 2000;

struct ChainOptions {
  bool require_lazy = false;
  double row_tolerance = 1e-12;
  double reversibility_tolerance = 1e-9;
};

// Immutable finite reversible chain. Safe to share across threads.
class ChainSpec {
 public:
  std::size_t size() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& label(std::size_t i) const { return states_.at(i); }
  const SparseKernel& kernel() const { return kernel_; }
  const Vector& stationary() const { return pi_; }
  double laziness_floor() const { return laziness_floor_; }
  bool is_lazy() const { return laziness_floor_ >= 0.5 - 1e-12; }
  double entry(std::size_t x, std::size_t y) const { return kernel_.coeff(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)); }

  std::optional<std::size_t> find(std::string_view label) const;
  // Throws InvalidArgument for unknown labels.
  std::size_t index_of(std::string_view label) const;

 private:
  friend ChainSpec build_chain(SparseKernel, std::vector<std::string>, const ChainOptions&);
  std::vector<std::string> states_;
  std::unordered_map<std::string, std::size_t> index_;
  SparseKernel kernel_;
  Vector pi_;
  double laziness_floor_ = 0.0;
};

// Rejects kernels that are not irreducible stochastic matrices in detailed balance. Labels may be
// empty, in which case states are named by index.
ChainSpec build_chain(SparseKernel kernel, std::vector<std::string> labels = {},
                      const ChainOptions& options = {});
ChainSpec build_chain(const Matrix& kernel, std::vector<std::string> labels = {},
                      const ChainOptions& options = {});

// Accumulates entries (duplicates are summed) and produces a compressed kernel.
class KernelBuilder {
 public:
  explicit KernelBuilder(std::size_t n) : n_(n) {}
  void add(std::size_t x, std::size_t y, double p);
  SparseKernel build() const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<Eigen::Triplet<double>> entries_;
};

// Stationary law of an irreducible reversible kernel, obtained by propagating
// detailed balance along a spanning tree. Stable when π spans many orders of
// magnitude, unlike a dense eigen-solve.
Vector stationary_distribution(const SparseKernel& kernel, double reversibility_tolerance = 1e-9);
Vector stationary_from_weights(const Vector& weights);

struct DistributionVector {
  Vector p;
  std::size_t time = 0;

  static DistributionVector point_mass(std::size_t n, std::size_t x);
  static DistributionVector from_vector(Vector p);
};

// One step μ ↦ μP, written into `out`.
void step(const ChainSpec& chain, const Vector& mu, Vector& out);
DistributionVector evolve(const ChainSpec& chain, const DistributionVector& start, std::size_t t);

// Yields P^0, P^1, ... as dense matrices. Row x of current() is the law at the
// current time started from x.
class KernelPowerSweep {
 public:
  explicit KernelPowerSweep(const ChainSpec& chain, std::size_t dense_limit = kDefaultDenseLimit);
  const Matrix& current() const { return power_; }
  std::size_t time() const { return time_; }
  void advance();

 private:
  const ChainSpec* chain_;
  Matrix power_;
  Matrix scratch_;
  std::size_t time_ = 0;
};

// Right multiplication by a sparse kernel: out = in · P, column-major friendly.
void multiply_by_kernel(const Matrix& in, const SparseKernel& kernel, Matrix& out);

}  // namespace mixlab

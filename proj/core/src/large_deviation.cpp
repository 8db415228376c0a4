#include "mixlab/large_deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixlab/error.hpp"

namespace mixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog3 = std::log(3.0);

}  // namespace

double RateFunction::lambda_star() {
  static const double value = std::log(6.0 / (3.0 + 2.0 * std::sqrt(2.0)));
  return value;
}

PhiValue phi(double lambda) {
  if (lambda > RateFunction::lambda_star()) return {kInf, true};
  // Smaller root of φ² − uφ + 2 = 0 in the cancellation-free form 4/(u + √(u²−8)),
  // with the root factored through u so that very negative λ does not overflow.
  const double u = 6.0 * std::exp(-lambda) - 3.0;
  const double r = std::max(0.0, 1.0 - 8.0 / (u * u));
  return {4.0 / (u * (1.0 + std::sqrt(r))), false};
}

double legendre_objective(double lambda, double s) {
  const PhiValue f = phi(lambda);
  if (f.infinite) return -kInf;
  return lambda * s - std::log(f.value);
}

PsiResult psi_detail(double s, const RateFunction& rf) {
  if (s < 1.0) return {kInf, -kInf, false, true};
  if (s == 1.0) return {kLog3, -kInf, false, true};

  const double hi_end = RateFunction::lambda_star();
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = rf.lambda_lo;
  double b = hi_end;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = legendre_objective(c, s);
  double fd = legendre_objective(d, s);
  while (b - a > rf.tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = legendre_objective(c, s);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = legendre_objective(d, s);
    }
  }
  PsiResult out;
  out.maximizer = 0.5 * (a + b);
  out.value = legendre_objective(out.maximizer, s);
  const double edge = legendre_objective(hi_end, s);
  if (edge >= out.value) {
    out.value = edge;
    out.maximizer = hi_end;
  }
  // λ = 0 gives exactly 0 since φ(0) = 1; keeps roundoff from pushing Ψ below zero near s = 6.
  if (const double origin = legendre_objective(0.0, s); origin > out.value) {
    out.value = origin;
    out.maximizer = 0.0;
  }
  out.at_boundary = hi_end - out.maximizer <= 10.0 * rf.tolerance;
  return out;
}

double psi(double s, const RateFunction& rf) { return psi_detail(s, rf).value; }

double psi_grid(double s, const RateFunction& rf) {
  if (s < 1.0) return kInf;
  if (s == 1.0) return kLog3;
  double lo = rf.lambda_lo;
  double hi = RateFunction::lambda_star();
  double best = -kInf;
  int points = 4001;
  for (int level = 0; level < 10; ++level) {
    const double h = (hi - lo) / (points - 1);
    int arg = 0;
    for (int i = 0; i < points; ++i) {
      const double v = legendre_objective(lo + h * i, s);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    const double centre = lo + h * arg;
    lo = std::max(rf.lambda_lo, centre - h);
    hi = std::min(RateFunction::lambda_star(), centre + h);
    points = 201;
  }
  return best;
}

PsiDerivatives psi_derivatives_at_6(double h) {
  auto diffs = [](double step, double& first, double& second) {
    const double up = psi(6.0 + step);
    const double mid = psi(6.0);
    const double down = psi(6.0 - step);
    first = (up - down) / (2.0 * step);
    second = (up - 2.0 * mid + down) / (step * step);
  };
  PsiDerivatives out;
  out.step = h;
  diffs(h, out.first, out.second);
  diffs(h / 2.0, out.first_half_step, out.second_half_step);
  return out;
}

SMSolution solve_sM(double M) {
  if (!(M >= 2.0)) throw PreconditionFailed("solve_sM requires M >= 2");
  const double target = std::log(2.0) / (2.0 * M);
  double lo = 1.0;
  double hi = 6.0;
  if (!(psi(lo) > target && psi(hi) < target)) {
    throw NoRoot("2M psi(s) = log 2 has no root in (1, 6)");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    // Ψ decreases on [1, 6].
    if (psi(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  SMSolution out;
  out.s_star = 0.5 * (lo + hi);
  out.s_M = 2.0 * M * out.s_star;
  out.residual = 2.0 * M * psi(out.s_star) - std::log(2.0);
  out.endpoint_binding = out.s_star - 1.0 < 1e-9;
  return out;
}

namespace {

// One step of the killed walk on {0, ..., N−1}; returns the mass absorbed at N.
double killed_step(std::vector<double>& v, std::vector<double>& next) {
  const std::size_t n = v.size();
  const double absorbed = v[n - 1] / 3.0;
  for (std::size_t x = 0; x < n; ++x) {
    double m = (x == 0 ? 2.0 / 3.0 : 0.5) * v[x];
    if (x > 0) m += v[x - 1] / 3.0;
    if (x + 1 < n) m += v[x + 1] / 6.0;
    next[x] = m;
  }
  v.swap(next);
  return absorbed;
}

}  // namespace

std::vector<double> level_hitting_pmf(int N, std::size_t horizon) {
  if (N < 1) throw InvalidArgument("level must be positive");
  std::vector<double> v(static_cast<std::size_t>(N), 0.0), next(v.size());
  v[0] = 1.0;
  std::vector<double> pmf(horizon + 1, 0.0);
  for (std::size_t t = 1; t <= horizon; ++t) pmf[t] = killed_step(v, next);
  return pmf;
}

std::vector<double> level_hitting_log_pmf(int N, std::size_t horizon) {
  if (N < 1) throw InvalidArgument("level must be positive");
  std::vector<double> v(static_cast<std::size_t>(N), 0.0), next(v.size());
  v[0] = 1.0;
  double log_scale = 0.0;
  std::vector<double> out(horizon + 1, -kInf);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double absorbed = killed_step(v, next);
    out[t] = absorbed > 0.0 ? std::log(absorbed) + log_scale : -kInf;
    const double top = *std::max_element(v.begin(), v.end());
    if (top > 0.0) {
      for (double& x : v) x /= top;
      log_scale += std::log(top);
    }
  }
  return out;
}

EmpiricalRate empirical_rate(int N, double s) {
  if (N < 1) throw InvalidArgument("N must be positive");
  if (s < 1.0) throw PreconditionFailed("T_N >= N, so s must be at least 1");
  EmpiricalRate out;
  out.t = static_cast<std::size_t>(std::floor(s * N + 1e-9));
  if (N <= 600) {
    const double p = level_hitting_pmf(N, out.t)[out.t];
    if (p >= 1e-300) {
      out.log_pmf = std::log(p);
      out.value = -out.log_pmf / N;
      return out;
    }
  }
  out.log_space = true;
  out.log_pmf = level_hitting_log_pmf(N, out.t)[out.t];
  out.value = -out.log_pmf / N;
  return out;
}

}  // namespace mixlab

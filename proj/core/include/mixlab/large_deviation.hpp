#pragma once

#include <cstddef>
#include <vector>

namespace mixlab {

// Rate function of the hitting time T_N of level N for the lazy walk on
// {0, ..., N} with up-rate 1/3, down-rate 1/6 and reflection at 0. One level
// crossing has generating function φ(λ) = E[e^{λτ}], finite up to λ*.
struct RateFunction {
  static double lambda_star();  // log(6 / (3 + 2√2))
  double lambda_lo = -40.0;     // left end of the maximizer search
  double tolerance = 1e-11;     // maximizer bracket width
};

struct PhiValue {
  double value = 0.0;
  bool infinite = false;
};

PhiValue phi(double lambda);

// λ s − log φ(λ); −∞ beyond λ*.
double legendre_objective(double lambda, double s);

struct PsiResult {
  double value = 0.0;
  double maximizer = 0.0;
  bool at_boundary = false;   // supremum attained at λ*
  bool analytic = false;      // closed-form value (s = 1 or s < 1)
};

PsiResult psi_detail(double s, const RateFunction& rf = {});
double psi(double s, const RateFunction& rf = {});
// Independent evaluation by successive grid refinement, for cross-checks.
double psi_grid(double s, const RateFunction& rf = {});

struct PsiDerivatives {
  double first = 0.0;
  double second = 0.0;
  double first_half_step = 0.0;
  double second_half_step = 0.0;
  double step = 0.0;
};

PsiDerivatives psi_derivatives_at_6(double h = 1e-3);

struct SMSolution {
  double s_star = 0.0;
  double s_M = 0.0;         // 2 M s*
  double residual = 0.0;    // 2 M Ψ(s*) − log 2
  bool endpoint_binding = false;
};

// Root in (1, 6) of 2 M Ψ(s) = log 2 by bisection on the decreasing branch.
SMSolution solve_sM(double M);

struct EmpiricalRate {
  double value = 0.0;       // −(1/N) log Pr[T_N = ⌊sN⌋]
  double log_pmf = 0.0;
  std::size_t t = 0;
  bool log_space = false;   // scaled recursion used (large N or underflow)
};

EmpiricalRate empirical_rate(int N, double s);

// log Pr[T_N = t] for t = 0..horizon, by the scaled absorption recursion.
std::vector<double> level_hitting_log_pmf(int N, std::size_t horizon);
// Same law by the plain recursion; entries may underflow to 0.
std::vector<double> level_hitting_pmf(int N, std::size_t horizon);

}  // namespace mixlab

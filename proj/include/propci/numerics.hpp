#pragma once

#include <functional>
#include <stdexcept>

namespace propci::num {

// Root-finding failures, kept distinct from std::domain_error so callers can
// tell a bad bracket from a bad argument.
struct bracket_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sign-change interval handed to find_root. f_lo_sign is the sign (+1/-1) of
// the objective at lo; find_root validates it and uses it to orient the search.
struct Bracket {
  double lo;
  double hi;
  int f_lo_sign;
};

// ln Gamma(z) for z > 0 via the Lanczos series (g = 7, 9-term coefficient set).
double log_gamma(double z);

// ln C(n, k).
double log_choose(int n, int k);

// ln[ C(n,k) p^k (1-p)^(n-k) ] with the 0*ln(0) = 0 convention; -inf allowed.
double log_binomial_pmf(int k, int n, double p);

// exp(log_binomial_pmf), underflows to 0 harmlessly.
double binomial_pmf(int k, int n, double p);

// Pr(X <= k) for X ~ B(n, p). Accepts k = -1 (returns 0) so that callers can
// write lower-tail equations without special-casing x = 0.
double binomial_cdf(int k, int n, double p);

// Inverse standard normal CDF (AS241, PPND16 rational approximations).
double normal_quantile(double q);

// Regularized incomplete beta I_t(a, b), continued fraction with modified
// Lentz evaluation, tail switch at t > (a+1)/(a+b+2).
double reg_inc_beta(double t, double a, double b);

// t such that reg_inc_beta(t, a, b) = q.
double beta_quantile(double q, double a, double b);

// Brent-style bracketed root find: bisection hardened with secant/inverse
// quadratic steps. Returns a point bracketed to width <= tol. Throws
// bracket_error when the objective does not change sign over the bracket and
// convergence_error when the 200-iteration cap is exceeded.
double find_root(const std::function<double(double)>& objective,
                 const Bracket& bracket, double tol = 1e-10);

}  // namespace propci::num

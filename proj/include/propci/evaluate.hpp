#pragma once

#include <cstdint>
#include <vector>

#include "propci/intervals.hpp"

namespace propci::eval {

// One (p, value) pair of an evaluation curve.
struct EvalPoint {
  double p = 0.0;
  double value = 0.0;
};

// Equally spaced abscissae on (0, 1), inclusive of both ends.
struct Grid {
  double start = 0.001;
  double stop = 0.999;
  int count = 999;

  // Validates the invariants (0 < start <= stop < 1, count >= 1, start ==
  // stop only when count == 1) and materializes the strictly increasing
  // point list. Throws std::domain_error on violation.
  std::vector<double> points() const;
};

// True coverage probability sum_k Pr_p(X=k) 1[lower(k) <= p <= upper(k)]
// with closed-interval membership. Deterministic methods only; StevensXU is
// rejected with std::invalid_argument (use stevens_exact_coverage).
double coverage_probability(Method method, int n, double p,
                            const ConfidenceSpec& spec);

// Coverage of the randomized X+U interval: sum_k Pr_p(X=k) m(k,p) with
// m(k,p) the Lebesgue measure of the covering u-set, obtained in closed form
// by inverting the defining tail equations at fixed p. Equals 1 - alpha.
double stevens_exact_coverage(int n, double p, const ConfidenceSpec& spec);

std::vector<EvalPoint> coverage_curve(Method method, int n,
                                      const ConfidenceSpec& spec,
                                      const Grid& grid);

// E_p[upper - lower]. For StevensXU the width is additionally averaged over
// u with quad_points-node Gauss-Legendre quadrature.
double expected_length(Method method, int n, double p,
                       const ConfidenceSpec& spec, int quad_points = 16);

std::vector<EvalPoint> length_curve(Method method, int n,
                                    const ConfidenceSpec& spec,
                                    const Grid& grid, int quad_points = 16);

// Moving average of (coverage - (1-alpha)) over a window around p
// (grid_density uniform points); suppresses the O(n^-1/2) oscillation and
// estimates the systematic coverage bias.
double smoothed_bias(Method method, int n, const ConfidenceSpec& spec,
                     double p, double window = 0.05, int grid_density = 201);

// Mean absolute residual of coverage about its local moving average:
// mean over the grid of |coverage(p) - (1-alpha) - smoothed_bias(p)|.
double oscillation_amplitude(Method method, int n, const ConfidenceSpec& spec,
                             const Grid& grid, double window = 0.05);

// Centering diagnostic for the Wald statistic W_n = sqrt(n)(p^ - p)/sqrt(p^q^):
// its exact expectation conditional on 0 < X < n (the statistic is undefined
// at the degenerate atoms) against the first-order approximation
// (p - 1/2)/sqrt(n p (1-p)).
struct WaldMomentDiagnostic {
  double exact_conditional = 0.0;
  double approx = 0.0;
};
WaldMomentDiagnostic wald_moment_diagnostic(int n, double p);

// Independent oracle for the enumeration: empirical coverage over seeded
// draws of X ~ B(n,p) (plus U for StevensXU), with its binomial standard
// error. Deterministic given the seed.
struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
};
MonteCarloResult monte_carlo_coverage(Method method, int n, double p,
                                      const ConfidenceSpec& spec,
                                      std::int64_t draws, std::uint64_t seed);

}  // namespace propci::eval

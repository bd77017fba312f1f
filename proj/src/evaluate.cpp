#include "propci/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "propci/numerics.hpp"
#include "propci/rng.hpp"

namespace propci::eval {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void validate_np(const char* who, int n, double p) {
  if (n < 1) throw std::domain_error(std::string(who) + ": n must be positive");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error(std::string(who) + ": p must lie in (0, 1)");
}

void validate_alpha(const char* who, const ConfidenceSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    throw std::domain_error(std::string(who) + ": alpha must lie in (0, 1)");
}

// Endpoints of a deterministic method for every k = 0..n, plus the ln C(n,k)
// table; built once per (method, n, spec) and reused across a whole p-sweep.
struct EndpointTable {
  int n = 0;
  std::vector<double> lower, upper, log_nck;
};

EndpointTable make_table(Method method, int n, const ConfidenceSpec& spec) {
  EndpointTable t;
  t.n = n;
  t.lower.resize(n + 1);
  t.upper.resize(n + 1);
  t.log_nck.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const Interval iv = compute(method, SampleSummary{n, k}, spec);
    t.lower[k] = iv.lower;
    t.upper[k] = iv.upper;
    t.log_nck[k] = num::log_choose(n, k);
  }
  return t;
}

// Same expression as num::log_binomial_pmf, with the ln C(n,k) term cached.
double pmf_cached(const EndpointTable& t, int k, double p) {
  double lp = t.log_nck[k];
  if (k > 0) lp += k * std::log(p);
  if (k < t.n) lp += (t.n - k) * std::log1p(-p);
  return std::exp(lp);
}

double coverage_from_table(const EndpointTable& t, double p) {
  double cov = 0.0;
  for (int k = 0; k <= t.n; ++k)
    if (t.lower[k] <= p && p <= t.upper[k]) cov += pmf_cached(t, k, p);
  return std::min(cov, 1.0);
}

double length_from_widths(const EndpointTable& t,
                          const std::vector<double>& width, double p) {
  double len = 0.0;
  for (int k = 0; k <= t.n; ++k) len += pmf_cached(t, k, p) * width[k];
  return len;
}

// Nodes and weights of m-point Gauss-Legendre quadrature on [0, 1], by
// Newton iteration on the Legendre recurrence.
void gauss_legendre_01(int m, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      deriv = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / deriv;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - z);
    nodes[m - 1 - i] = 0.5 * (1.0 + z);
    // [-1,1] weight 2/((1-z^2) P'^2), halved by the map onto [0,1]
    weights[i] = 1.0 / ((1.0 - z * z) * deriv * deriv);
    weights[m - 1 - i] = weights[i];
  }
}

// u-averaged interval width for every k, by Gauss-Legendre over u.
std::vector<double> stevens_mean_widths(int n, const ConfidenceSpec& spec,
                                        int quad_points) {
  if (quad_points < 1)
    throw std::domain_error("expected_length: quad_points must be positive");
  std::vector<double> nodes, weights;
  gauss_legendre_01(quad_points, nodes, weights);
  std::vector<double> width(n + 1, 0.0);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j < quad_points; ++j)
      width[k] += weights[j] *
                  stevens(SampleSummary{n, k}, spec, nodes[j]).width();
  return width;
}

double smoothed_bias_impl(Method method, const EndpointTable* table, int n,
                          const ConfidenceSpec& spec, double p, double window,
                          int grid_density) {
  if (!(window > 0.0))
    throw std::domain_error("smoothed_bias: window must be positive");
  if (grid_density < 1)
    throw std::domain_error("smoothed_bias: grid_density must be positive");
  const double lo = p - 0.5 * window;
  const double hi = p + 0.5 * window;
  if (!(lo > 0.0 && hi < 1.0))
    throw std::domain_error("smoothed_bias: window extends outside (0, 1)");
  const double nominal = 1.0 - spec.alpha;
  double acc = 0.0;
  for (int i = 0; i < grid_density; ++i) {
    const double pi =
        grid_density == 1 ? p : lo + i * (window / (grid_density - 1));
    const double cov = method == Method::StevensXU
                           ? stevens_exact_coverage(n, pi, spec)
                           : coverage_from_table(*table, pi);
    acc += cov - nominal;
  }
  return acc / grid_density;
}

}  // namespace

std::vector<double> Grid::points() const {
  if (count < 1) throw std::domain_error("Grid: count must be at least 1");
  if (!(start > 0.0 && stop < 1.0 && start <= stop))
    throw std::domain_error("Grid: need 0 < start <= stop < 1");
  if (count == 1) {
    if (start != stop)
      throw std::domain_error("Grid: a single-point grid needs start == stop");
    return {start};
  }
  if (!(start < stop))
    throw std::domain_error("Grid: count > 1 needs start < stop");
  std::vector<double> pts(count);
  const double step = (stop - start) / (count - 1);
  for (int i = 0; i < count; ++i) pts[i] = start + i * step;
  pts.back() = stop;
  return pts;
}

double coverage_probability(Method method, int n, double p,
                            const ConfidenceSpec& spec) {
  validate_np("coverage_probability", n, p);
  if (method == Method::StevensXU)
    throw std::invalid_argument(
        "coverage_probability: the randomized method has no single coverage "
        "value per outcome; use stevens_exact_coverage");
  const EndpointTable table = make_table(method, n, spec);
  return coverage_from_table(table, p);
}

double stevens_exact_coverage(int n, double p, const ConfidenceSpec& spec) {
  validate_np("stevens_exact_coverage", n, p);
  validate_alpha("stevens_exact_coverage", spec);
  const double target = 0.5 * spec.alpha;
  std::vector<double> pmf(n + 1);
  for (int k = 0; k <= n; ++k) pmf[k] = num::binomial_pmf(k, n, p);
  std::vector<double> upper_tail(n + 2, 0.0);  // Pr_p(X >= k)
  for (int k = n; k >= 0; --k) upper_tail[k] = upper_tail[k + 1] + pmf[k];
  // p <= upper(k,u) iff u >= (alpha/2 - Pr(X<=k-1))/Pr(X=k), and
  // p >= lower(k,u) iff 1-u >= (alpha/2 - Pr(X>=k+1))/Pr(X=k): the covering
  // u-set is an interval whose length integrates to exactly 1 - alpha.
  double cdf_prev = 0.0;  // Pr_p(X <= k-1)
  double cov = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (pmf[k] > 0.0) {
      const double a = (target - cdf_prev) / pmf[k];
      const double b = (target - upper_tail[k + 1]) / pmf[k];
      const double m = std::min(1.0, 1.0 - b) - std::max(0.0, a);
      if (m > 0.0) cov += pmf[k] * m;
    }
    cdf_prev += pmf[k];
  }
  return std::clamp(cov, 0.0, 1.0);
}

std::vector<EvalPoint> coverage_curve(Method method, int n,
                                      const ConfidenceSpec& spec,
                                      const Grid& grid) {
  const std::vector<double> pts = grid.points();
  std::vector<EvalPoint> curve;
  curve.reserve(pts.size());
  if (method == Method::StevensXU) {
    for (double p : pts)
      curve.push_back({p, stevens_exact_coverage(n, p, spec)});
    return curve;
  }
  if (n < 1) throw std::domain_error("coverage_curve: n must be positive");
  const EndpointTable table = make_table(method, n, spec);
  for (double p : pts) curve.push_back({p, coverage_from_table(table, p)});
  return curve;
}

double expected_length(Method method, int n, double p,
                       const ConfidenceSpec& spec, int quad_points) {
  validate_np("expected_length", n, p);
  if (quad_points < 1)
    throw std::domain_error("expected_length: quad_points must be positive");
  if (method == Method::StevensXU) {
    EndpointTable t;  // only the pmf cache is needed here
    t.n = n;
    t.log_nck.resize(n + 1);
    for (int k = 0; k <= n; ++k) t.log_nck[k] = num::log_choose(n, k);
    return length_from_widths(t, stevens_mean_widths(n, spec, quad_points), p);
  }
  const EndpointTable table = make_table(method, n, spec);
  std::vector<double> width(n + 1);
  for (int k = 0; k <= n; ++k) width[k] = table.upper[k] - table.lower[k];
  return length_from_widths(table, width, p);
}

std::vector<EvalPoint> length_curve(Method method, int n,
                                    const ConfidenceSpec& spec,
                                    const Grid& grid, int quad_points) {
  const std::vector<double> pts = grid.points();
  if (n < 1) throw std::domain_error("length_curve: n must be positive");
  if (quad_points < 1)
    throw std::domain_error("length_curve: quad_points must be positive");
  EndpointTable table;
  std::vector<double> width;
  if (method == Method::StevensXU) {
    table.n = n;
    table.log_nck.resize(n + 1);
    for (int k = 0; k <= n; ++k) table.log_nck[k] = num::log_choose(n, k);
    width = stevens_mean_widths(n, spec, quad_points);
  } else {
    table = make_table(method, n, spec);
    width.resize(n + 1);
    for (int k = 0; k <= n; ++k) width[k] = table.upper[k] - table.lower[k];
  }
  std::vector<EvalPoint> curve;
  curve.reserve(pts.size());
  for (double p : pts) curve.push_back({p, length_from_widths(table, width, p)});
  return curve;
}

double smoothed_bias(Method method, int n, const ConfidenceSpec& spec,
                     double p, double window, int grid_density) {
  validate_np("smoothed_bias", n, p);
  validate_alpha("smoothed_bias", spec);
  if (method == Method::StevensXU)
    return smoothed_bias_impl(method, nullptr, n, spec, p, window,
                              grid_density);
  const EndpointTable table = make_table(method, n, spec);
  return smoothed_bias_impl(method, &table, n, spec, p, window, grid_density);
}

double oscillation_amplitude(Method method, int n, const ConfidenceSpec& spec,
                             const Grid& grid, double window) {
  const std::vector<double> pts = grid.points();
  if (n < 1)
    throw std::domain_error("oscillation_amplitude: n must be positive");
  validate_alpha("oscillation_amplitude", spec);
  const double nominal = 1.0 - spec.alpha;
  EndpointTable table;
  if (method != Method::StevensXU) table = make_table(method, n, spec);
  const EndpointTable* tp = method == Method::StevensXU ? nullptr : &table;
  double acc = 0.0;
  for (double p : pts) {
    const double cov = method == Method::StevensXU
                           ? stevens_exact_coverage(n, p, spec)
                           : coverage_from_table(table, p);
    const double bias = smoothed_bias_impl(method, tp, n, spec, p, window, 201);
    acc += std::fabs(cov - nominal - bias);
  }
  return acc / static_cast<double>(pts.size());
}

WaldMomentDiagnostic wald_moment_diagnostic(int n, double p) {
  if (n < 2)
    throw std::domain_error("wald_moment_diagnostic: n must be at least 2");
  validate_np("wald_moment_diagnostic", n, p);
  double weighted = 0.0, mass = 0.0;
  for (int k = 1; k < n; ++k) {
    const double ph = static_cast<double>(k) / n;
    const double w = std::sqrt(static_cast<double>(n)) * (ph - p) /
                     std::sqrt(ph * (1.0 - ph));
    const double m = num::binomial_pmf(k, n, p);
    weighted += m * w;
    mass += m;
  }
  WaldMomentDiagnostic diag;
  diag.exact_conditional = weighted / mass;
  diag.approx = (p - 0.5) / std::sqrt(n * p * (1.0 - p));
  return diag;
}

namespace {

// Covering u-interval [u_lo, u_hi] per outcome k, located by bisection in u
// over the production stevens() endpoints (monotone nondecreasing in u).
// Deliberately independent of the closed-form inversion used by
// stevens_exact_coverage, so the two routes cross-check each other.
struct StevensUWindow {
  double u_lo = 2.0, u_hi = -1.0;  // empty unless both predicates can hold
};

std::vector<StevensUWindow> stevens_u_windows(int n, double p,
                                              const ConfidenceSpec& spec) {
  constexpr int kBisectSteps = 48;
  std::vector<StevensUWindow> win(n + 1);
  for (int k = 0; k <= n; ++k) {
    const SampleSummary s{n, k};
    // smallest u with upper(k,u) >= p
    if (stevens(s, spec, 1.0).upper >= p) {
      if (stevens(s, spec, 0.0).upper >= p) {
        win[k].u_lo = 0.0;
      } else {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < kBisectSteps; ++i) {
          const double mid = 0.5 * (lo + hi);
          (stevens(s, spec, mid).upper >= p ? hi : lo) = mid;
        }
        win[k].u_lo = hi;
      }
      // largest u with lower(k,u) <= p
      if (stevens(s, spec, 0.0).lower <= p) {
        if (stevens(s, spec, 1.0).lower <= p) {
          win[k].u_hi = 1.0;
        } else {
          double lo = 0.0, hi = 1.0;
          for (int i = 0; i < kBisectSteps; ++i) {
            const double mid = 0.5 * (lo + hi);
            (stevens(s, spec, mid).lower <= p ? lo : hi) = mid;
          }
          win[k].u_hi = lo;
        }
      }
    }
  }
  return win;
}

}  // namespace

MonteCarloResult monte_carlo_coverage(Method method, int n, double p,
                                      const ConfidenceSpec& spec,
                                      std::int64_t draws, std::uint64_t seed) {
  validate_np("monte_carlo_coverage", n, p);
  if (draws < 1)
    throw std::domain_error("monte_carlo_coverage: draws must be positive");
  std::vector<double> cum(n + 1);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    acc += num::binomial_pmf(k, n, p);
    cum[k] = acc;
  }
  const bool randomized = method == Method::StevensXU;
  std::vector<double> lower, upper;
  std::vector<StevensUWindow> windows;
  if (randomized) {
    validate_alpha("monte_carlo_coverage", spec);
    windows = stevens_u_windows(n, p, spec);
  } else {
    const EndpointTable table = make_table(method, n, spec);
    lower = table.lower;
    upper = table.upper;
  }
  SplitMix64 rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < draws; ++i) {
    const double r = rng.next_double();
    const int k = static_cast<int>(
        std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
    const int kk = std::min(k, n);  // guard the sub-rounding residual tail
    if (randomized) {
      const double u = rng.next_double();
      if (windows[kk].u_lo <= u && u <= windows[kk].u_hi) ++hits;
    } else {
      if (lower[kk] <= p && p <= upper[kk]) ++hits;
    }
  }
  MonteCarloResult res;
  res.estimate = static_cast<double>(hits) / static_cast<double>(draws);
  res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) /
                            static_cast<double>(draws));
  return res;
}

}  // namespace propci::eval

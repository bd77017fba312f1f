#include "propci/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "propci/numerics.hpp"
#include "propci/rng.hpp"

namespace propci {

namespace {

// Tolerance (bracket width on p) for every endpoint root-find. Tight enough
// that even the steepest defining equation (likelihood-ratio deviance near a
// boundary, slope ~1e4) keeps its residual well under 1e-9, yet still far
// above double spacing on [0, 1].
constexpr double kRootTol = 1e-14;

// Largest double strictly below 1; ln(1 - kAlmostOne) is still finite.
constexpr double kAlmostOne = 0x1.fffffffffffffp-1;

void validate(const SampleSummary& sample, const ConfidenceSpec& spec) {
  if (sample.n < 1)
    throw std::domain_error("interval: n must be a positive integer");
  if (sample.x < 0 || sample.x > sample.n)
    throw std::domain_error("interval: x must lie in [0, n]");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    throw std::domain_error("interval: alpha must lie in (0, 1)");
  if (!(spec.kappa > 0.0))
    throw std::domain_error("interval: kappa must be positive");
}

// Upper endpoint of the CP family: the root in p of
//   Pr_p(X <= x-1) + c * Pr_p(X = x) = alpha/2,
// whose left side is decreasing in p. c = 1 gives Clopper-Pearson, c = 1/2
// Mid-P, c = u Stevens. Clamps to 0 or 1 when the equation has no root in
// (0, 1) (the value at the boundary already sits on the wrong side).
double tail_upper(int x, int n, double c, double alpha) {
  const double target = 0.5 * alpha;
  const double at_zero = (x >= 1 ? 1.0 : c) - target;
  if (at_zero <= 0.0) return 0.0;
  const double at_one = (x == n ? c : 0.0) - target;
  if (at_one >= 0.0) return 1.0;
  const auto objective = [&](double p) {
    return num::binomial_cdf(x - 1, n, p) + c * num::binomial_pmf(x, n, p) -
           target;
  };
  return num::find_root(objective, num::Bracket{0.0, 1.0, 1}, kRootTol);
}

// Lower endpoint, mirror equation: root in p of
//   Pr_p(X >= x+1) + c * Pr_p(X = x) = alpha/2  (left side increasing in p).
double tail_lower(int x, int n, double c, double alpha) {
  const double target = 0.5 * alpha;
  const double at_one = (x == n ? c : 1.0) - target;
  if (at_one <= 0.0) return 1.0;
  const double at_zero = (x == 0 ? c : 0.0) - target;
  if (at_zero >= 0.0) return 0.0;
  const auto objective = [&](double p) {
    return 1.0 - num::binomial_cdf(x, n, p) + c * num::binomial_pmf(x, n, p) -
           target;
  };
  return num::find_root(objective, num::Bracket{0.0, 1.0, -1}, kRootTol);
}

Interval make_interval(double lower, double upper, Method method,
                       const SampleSummary& sample, const ConfidenceSpec& spec,
                       std::optional<double> aux_u = std::nullopt) {
  Interval iv;
  iv.lower = std::clamp(lower, 0.0, 1.0);
  iv.upper = std::clamp(upper, 0.0, 1.0);
  iv.method = method;
  iv.sample = sample;
  iv.spec = spec;
  iv.aux_u = aux_u;
  return iv;
}

}  // namespace

double default_kappa(double alpha) {
  return num::normal_quantile(1.0 - alpha / 2.0);
}

ConfidenceSpec ConfidenceSpec::from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("ConfidenceSpec: alpha must lie in (0, 1)");
  return ConfidenceSpec{alpha, default_kappa(alpha)};
}

ConfidenceSpec ConfidenceSpec::from_alpha_kappa(double alpha, double kappa) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("ConfidenceSpec: alpha must lie in (0, 1)");
  if (!(kappa > 0.0))
    throw std::domain_error("ConfidenceSpec: kappa must be positive");
  return ConfidenceSpec{alpha, kappa};
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::Wald: return "wald";
    case Method::Wilson: return "wilson";
    case Method::AgrestiCoull: return "agresti_coull";
    case Method::ClopperPearson: return "clopper_pearson";
    case Method::MidP: return "mid_p";
    case Method::Jeffreys: return "jeffreys";
    case Method::LikelihoodRatio: return "likelihood_ratio";
    case Method::StevensXU: return "stevens";
  }
  throw std::invalid_argument("method_name: unknown method");
}

Method method_from_string(std::string_view name) {
  for (Method m : kAllMethods)
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method name: " + std::string(name));
}

Interval wald(const SampleSummary& sample, const ConfidenceSpec& spec) {
  validate(sample, spec);
  const double ph = sample.p_hat();
  const double half = spec.kappa * std::sqrt(ph * (1.0 - ph) / sample.n);
  return make_interval(ph - half, ph + half, Method::Wald, sample, spec);
}

Interval wilson(const SampleSummary& sample, const ConfidenceSpec& spec) {
  validate(sample, spec);
  const double n = sample.n;
  const double k2 = spec.kappa * spec.kappa;
  const double ph = sample.p_hat();
  const double center = (sample.x + 0.5 * k2) / (n + k2);
  const double half = spec.kappa * std::sqrt(n) / (n + k2) *
                      std::sqrt(ph * (1.0 - ph) + k2 / (4.0 * n));
  // At x = 0 the score equation gives lower = 0 exactly (and upper = 1 at
  // x = n); evaluating center -/+ half there is pure cancellation noise.
  const double lower = sample.x == 0 ? 0.0 : center - half;
  const double upper = sample.x == sample.n ? 1.0 : center + half;
  return make_interval(lower, upper, Method::Wilson, sample, spec);
}

Interval agresti_coull(const SampleSummary& sample,
                       const ConfidenceSpec& spec) {
  validate(sample, spec);
  const double n = sample.n;
  const double k2 = spec.kappa * spec.kappa;
  const double n_tilde = n + k2;
  // Same expression as the Wilson center, so the two agree bit for bit.
  const double p_tilde = (sample.x + 0.5 * k2) / (n + k2);
  const double half =
      spec.kappa * std::sqrt(p_tilde * (1.0 - p_tilde) / n_tilde);
  return make_interval(p_tilde - half, p_tilde + half, Method::AgrestiCoull,
                       sample, spec);
}

Interval clopper_pearson(const SampleSummary& sample,
                         const ConfidenceSpec& spec) {
  validate(sample, spec);
  return make_interval(tail_lower(sample.x, sample.n, 1.0, spec.alpha),
                       tail_upper(sample.x, sample.n, 1.0, spec.alpha),
                       Method::ClopperPearson, sample, spec);
}

Interval mid_p(const SampleSummary& sample, const ConfidenceSpec& spec) {
  validate(sample, spec);
  return make_interval(tail_lower(sample.x, sample.n, 0.5, spec.alpha),
                       tail_upper(sample.x, sample.n, 0.5, spec.alpha),
                       Method::MidP, sample, spec);
}

Interval jeffreys(const SampleSummary& sample, const ConfidenceSpec& spec) {
  validate(sample, spec);
  const double a = sample.x + 0.5;
  const double b = sample.n - sample.x + 0.5;
  const double lower =
      sample.x == 0 ? 0.0 : num::beta_quantile(spec.alpha / 2.0, a, b);
  const double upper =
      sample.x == sample.n ? 1.0
                           : num::beta_quantile(1.0 - spec.alpha / 2.0, a, b);
  return make_interval(lower, upper, Method::Jeffreys, sample, spec);
}

Interval likelihood_ratio(const SampleSummary& sample,
                          const ConfidenceSpec& spec) {
  validate(sample, spec);
  const int x = sample.x;
  const int n = sample.n;
  const double k2 = spec.kappa * spec.kappa;
  if (x == 0) {
    // deviance reduces to -2 n ln(1-p) = kappa^2
    return make_interval(0.0, -std::expm1(-k2 / (2.0 * n)),
                         Method::LikelihoodRatio, sample, spec);
  }
  if (x == n) {
    return make_interval(std::exp(-k2 / (2.0 * n)), 1.0,
                         Method::LikelihoodRatio, sample, spec);
  }
  const double ph = sample.p_hat();
  const double ell_hat = x * std::log(ph) + (n - x) * std::log1p(-ph);
  // Deviance minus kappa^2: negative at p-hat, increasing toward both ends.
  const auto objective = [&](double p) {
    const double ell = x * std::log(p) + (n - x) * std::log1p(-p);
    return 2.0 * (ell_hat - ell) - k2;
  };
  const double lower =
      num::find_root(objective, num::Bracket{1e-300, ph, 1}, kRootTol);
  double upper;
  if (objective(kAlmostOne) <= 0.0)
    upper = 1.0;  // interval reaches past the last double below 1
  else
    upper = num::find_root(objective, num::Bracket{ph, kAlmostOne, -1},
                           kRootTol);
  return make_interval(lower, upper, Method::LikelihoodRatio, sample, spec);
}

Interval stevens(const SampleSummary& sample, const ConfidenceSpec& spec,
                 double u) {
  validate(sample, spec);
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("stevens: u must lie in [0, 1]");
  // X + U tail probabilities: Pr_p(X+U <= x+u) = Pr_p(X <= x-1) + u Pr_p(X=x),
  // so the upper tail equation weights the observed term by u and the lower
  // (mirror) equation by 1-u. u = 1/2 is exactly Mid-P.
  return make_interval(tail_lower(sample.x, sample.n, 1.0 - u, spec.alpha),
                       tail_upper(sample.x, sample.n, u, spec.alpha),
                       Method::StevensXU, sample, spec, u);
}

Interval compute(Method method, const SampleSummary& sample,
                 const ConfidenceSpec& spec, std::optional<double> u,
                 std::optional<std::uint64_t> seed) {
  switch (method) {
    case Method::Wald: return wald(sample, spec);
    case Method::Wilson: return wilson(sample, spec);
    case Method::AgrestiCoull: return agresti_coull(sample, spec);
    case Method::ClopperPearson: return clopper_pearson(sample, spec);
    case Method::MidP: return mid_p(sample, spec);
    case Method::Jeffreys: return jeffreys(sample, spec);
    case Method::LikelihoodRatio: return likelihood_ratio(sample, spec);
    case Method::StevensXU: break;
  }
  if (u) return stevens(sample, spec, *u);
  if (seed) return stevens(sample, spec, SplitMix64(*seed).next_double());
  throw std::invalid_argument("stevens requires a randomization value u or a seed");
}

}  // namespace propci

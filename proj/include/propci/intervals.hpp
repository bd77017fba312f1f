#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace propci {

// Observed binomial data: x successes out of n trials.
struct SampleSummary {
  int n = 1;
  int x = 0;

  double p_hat() const { return static_cast<double>(x) / n; }
  double q_hat() const { return 1.0 - p_hat(); }
};

// Critical value z_{1-alpha/2} used when kappa is not overridden.
double default_kappa(double alpha);

// Nominal level parameters. kappa is the critical value z_{1-alpha/2} by
// default, but overridable (e.g. to exactly 2 for the +2/+2 rule).
struct ConfidenceSpec {
  double alpha = 0.05;
  double kappa = default_kappa(0.05);

  static ConfidenceSpec from_alpha(double alpha);
  static ConfidenceSpec from_alpha_kappa(double alpha, double kappa);
};

enum class Method {
  Wald,
  Wilson,
  AgrestiCoull,
  ClopperPearson,
  MidP,
  Jeffreys,
  LikelihoodRatio,
  StevensXU,
};

inline constexpr std::array<Method, 8> kAllMethods = {
    Method::Wald,           Method::Wilson,  Method::AgrestiCoull,
    Method::ClopperPearson, Method::MidP,    Method::Jeffreys,
    Method::LikelihoodRatio, Method::StevensXU,
};

// Stable lowercase names used by the CLI and CSV output.
std::string_view method_name(Method method);
// Throws std::invalid_argument for unknown names.
Method method_from_string(std::string_view name);

// A computed confidence interval with full provenance. aux_u is present
// exactly when method == StevensXU.
struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  Method method = Method::Wald;
  SampleSummary sample;
  ConfidenceSpec spec;
  std::optional<double> aux_u;

  double width() const { return upper - lower; }
};

Interval wald(const SampleSummary& sample, const ConfidenceSpec& spec);
Interval wilson(const SampleSummary& sample, const ConfidenceSpec& spec);
Interval agresti_coull(const SampleSummary& sample, const ConfidenceSpec& spec);
Interval clopper_pearson(const SampleSummary& sample,
                         const ConfidenceSpec& spec);
Interval mid_p(const SampleSummary& sample, const ConfidenceSpec& spec);
Interval jeffreys(const SampleSummary& sample, const ConfidenceSpec& spec);
Interval likelihood_ratio(const SampleSummary& sample,
                          const ConfidenceSpec& spec);
// Randomized interval from the statistic X + U; u is the realized value of U.
Interval stevens(const SampleSummary& sample, const ConfidenceSpec& spec,
                 double u);

// Uniform dispatch. StevensXU needs a randomization source: an explicit u, or
// a seed from which one uniform draw is taken (deterministic per seed). Both
// are ignored for the deterministic methods.
Interval compute(Method method, const SampleSummary& sample,
                 const ConfidenceSpec& spec,
                 std::optional<double> u = std::nullopt,
                 std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace propci

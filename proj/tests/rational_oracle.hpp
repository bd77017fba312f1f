#pragma once

// Exact-rational helpers used only by the tests.  Binomial tail probabilities
// are evaluated in arbitrary-precision rational arithmetic so double-precision
// results can be compared against a genuinely independent oracle.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace oracle {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

// Exact value of a finite double as a rational number.
inline rational rational_from_double(double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("rational_from_double: non-finite input");
  }
  int exp = 0;
  const double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));  // exact integer
  rational r(scaled);
  const int shift = exp - 53;
  const bigint two_pow = bigint(1) << std::abs(shift);
  if (shift >= 0) {
    r *= rational(two_pow);
  } else {
    r /= rational(two_pow);
  }
  return r;
}

inline bigint binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return bigint(0);
  bigint num = 1;
  bigint den = 1;
  for (int j = 1; j <= k; ++j) {
    num *= n - k + j;
    den *= j;
  }
  return num / den;  // exact: the quotient is an integer
}

inline rational rat_pow(rational base, int e) {
  rational r(1);
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Pr(X = k) for X ~ Binomial(n, p), exact.
inline rational binomial_pmf_exact(int k, int n, const rational& p) {
  if (k < 0 || k > n) return rational(0);
  return rational(binomial_coefficient(n, k)) * rat_pow(p, k) *
         rat_pow(rational(1) - p, n - k);
}

// Pr(X <= k) for X ~ Binomial(n, p), exact.
inline rational binomial_cdf_exact(int k, int n, const rational& p) {
  if (k < 0) return rational(0);
  if (k >= n) return rational(1);
  rational sum(0);
  for (int j = 0; j <= k; ++j) {
    sum += binomial_pmf_exact(j, n, p);
  }
  return sum;
}

inline double to_double(const rational& r) { return r.convert_to<double>(); }

}  // namespace oracle

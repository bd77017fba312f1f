#include "propci/numerics.hpp"

#include <cmath>
#include <limits>

namespace propci::num {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640561764;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

double log_gamma(double z) {
  // Lanczos approximation, g = 7 with the 9-term coefficient set published by
  // Godfrey; relative accuracy ~1e-15 on Gamma for real z > 0.
  static constexpr double coeff[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (!(z > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
  if (z < 0.5) {
    // reflection Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(kPi / std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  const double x = z - 1.0;
  double series = coeff[0];
  for (int i = 1; i < 9; ++i) series += coeff[i] / (x + i);
  const double t = x + 7.5;
  return kHalfLogTwoPi + (x + 0.5) * std::log(t) - t + std::log(series);
}

double log_choose(int n, int k) {
  if (n < 0 || k < 0 || k > n)
    throw std::domain_error("log_choose: need 0 <= k <= n");
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double log_binomial_pmf(int k, int n, double p) {
  if (n < 1) throw std::domain_error("log_binomial_pmf: n must be positive");
  if (k < 0 || k > n)
    throw std::domain_error("log_binomial_pmf: k out of [0, n]");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("log_binomial_pmf: p outside [0, 1]");
  if (p == 0.0)
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p == 1.0)
    return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  double lp = log_choose(n, k);
  if (k > 0) lp += k * std::log(p);
  if (k < n) lp += (n - k) * std::log1p(-p);  // log1p keeps 1-p accurate
  return lp;
}

double binomial_pmf(int k, int n, double p) {
  return std::exp(log_binomial_pmf(k, n, p));
}

double binomial_cdf(int k, int n, double p) {
  if (n < 1) throw std::domain_error("binomial_cdf: n must be positive");
  if (k < -1 || k > n) throw std::domain_error("binomial_cdf: k out of [-1, n]");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binomial_cdf: p outside [0, 1]");
  if (k == -1) return 0.0;
  if (k == n) return 1.0;
  if (p == 0.0) return 1.0;  // k >= 0 here
  if (p == 1.0) return 0.0;  // k < n here
  // Sum the tail with the smaller mass, smallest terms first.
  if (static_cast<double>(k) <= n * p) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += binomial_pmf(j, n, p);
    return s < 1.0 ? s : 1.0;
  }
  double s = 0.0;
  for (int j = n; j > k; --j) s += binomial_pmf(j, n, p);
  return s < 1.0 ? 1.0 - s : 0.0;
}

double normal_quantile(double q) {
  // Wichura's algorithm AS241 (PPND16); absolute error below 1e-15 over the
  // usable double range. Evaluated on min(q, 1-q) and reflected, so the
  // result is antisymmetric by construction.
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("normal_quantile: q outside (0, 1)");
  const double r = q - 0.5;
  if (std::fabs(r) <= 0.425) {
    const double s = 0.180625 - r * r;
    return r *
           (((((((2.5090809287301226727e+3 * s + 3.3430575583588128105e+4) * s +
                 6.7265770927008700853e+4) * s + 4.5921953931549871457e+4) * s +
               1.3731693765509461125e+4) * s + 1.9715909503065514427e+3) * s +
             1.3314166789178437745e+2) * s + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * s + 2.8729085735721942674e+4) * s +
                 3.9307895800092710610e+4) * s + 2.1213794301586595867e+4) * s +
               5.3941960214247511077e+3) * s + 6.8718700749205790830e+2) * s +
             4.2313330701600911252e+1) * s + 1.0);
  }
  const double tail = q < 0.5 ? q : 1.0 - q;
  double t = std::sqrt(-std::log(tail));
  double z;
  if (t <= 5.0) {
    t -= 1.6;
    z = (((((((7.74545014278341407640e-4 * t + 2.27238449892691845833e-2) * t +
              2.41780725177450611770e-1) * t + 1.27045825245236838258e0) * t +
            3.64784832476320460504e0) * t + 5.76949722146069140550e0) * t +
          4.63033784615654529590e0) * t + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * t + 5.47593808499534494600e-4) * t +
              1.51986665636164571966e-2) * t + 1.48103976427480074590e-1) * t +
            6.89767334985100004550e-1) * t + 1.67638483018380384940e0) * t +
          2.05319162663775882187e0) * t + 1.0);
  } else {
    t -= 5.0;
    z = (((((((2.01033439929228813265e-7 * t + 2.71155556874348757815e-5) * t +
              1.24266094738807843860e-3) * t + 2.65321895265761230930e-2) * t +
            2.96560571828504891230e-1) * t + 1.78482653991729133580e0) * t +
          5.46378491116411436990e0) * t + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * t + 1.42151175831644588870e-7) * t +
              1.84631831751005468180e-5) * t + 7.86869131145613259100e-4) * t +
            1.48753612908506148525e-2) * t + 1.36929880922735805310e-1) * t +
          5.99832206555887937690e-1) * t + 1.0);
  }
  return q < 0.5 ? -z : z;
}

namespace {

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Continued fraction for I_t(a, b), modified Lentz evaluation.
double beta_cf(double a, double b, double t) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * t / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * t / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw convergence_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double t, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("reg_inc_beta: shape parameters must be positive");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("reg_inc_beta: t outside [0, 1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(t) + b * std::log1p(-t) - log_beta(a, b));
  if (t < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, t) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - t) / b;
}

double beta_quantile(double q, double a, double b) {
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("beta_quantile: q outside (0, 1)");
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta_quantile: shape parameters must be positive");
  const auto objective = [&](double t) { return reg_inc_beta(t, a, b) - q; };
  // I_t is strictly increasing in t; f(0) = -q < 0.
  return find_root(objective, Bracket{0.0, 1.0, -1}, 1e-14);
}

double find_root(const std::function<double(double)>& objective,
                 const Bracket& bracket, double tol) {
  if (!(bracket.lo < bracket.hi))
    throw std::domain_error("find_root: bracket must satisfy lo < hi");
  if (bracket.f_lo_sign != 1 && bracket.f_lo_sign != -1)
    throw std::domain_error("find_root: f_lo_sign must be +1 or -1");
  if (!(tol >= 0.0)) throw std::domain_error("find_root: tol must be >= 0");

  double a = bracket.lo, b = bracket.hi;
  double fa = objective(a), fb = objective(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw bracket_error("find_root: objective not finite at bracket ends");
  if (sign_of(fa) == 0) return a;
  if (sign_of(fb) == 0) return b;
  if (sign_of(fa) != bracket.f_lo_sign)
    throw bracket_error("find_root: declared sign does not match objective(lo)");
  if (sign_of(fa) == sign_of(fb))
    throw bracket_error("find_root: no sign change over bracket");

  // Brent's method (zeroin): b is the current best iterate, a the previous
  // one, c the most recent point with f(c) of opposite sign to f(b).
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      // attempt secant / inverse quadratic interpolation
      const double s = fb / fa;
      double p, qq;
      if (a == c) {
        p = 2.0 * xm * s;
        qq = 1.0 - s;
      } else {
        const double q1 = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * q1 * (q1 - r) - (b - a) * (r - 1.0));
        qq = (q1 - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) qq = -qq;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * qq - std::fabs(tol1 * qq),
                             std::fabs(e * qq))) {
        e = d;
        d = p / qq;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::fabs(d) > tol1)
      b += d;
    else
      b += xm > 0.0 ? tol1 : -tol1;
    fb = objective(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  throw convergence_error("find_root: iteration cap (200) exceeded");
}

}  // namespace propci::num

#pragma once

// Special functions for beta-distributed point sets on the unit ball:
// log-gamma, the regularized incomplete beta, the normalizing constants
// c_{d,beta} of the ball densities, the one-dimensional CDF F_beta, and
// unit-ball volumes. Everything here is pure and thread-safe.

#include <cmath>
#include <stdexcept>
#include <string>

namespace betapoly {

// Shape exponent of the ball density c_{d,beta} * (1 - |x|^2)^beta.
// Only beta > -1 gives an integrable density; the sphere-uniform limit
// beta -> -1 is handled by the sampler, never by this type.
class BetaParam {
 public:
  explicit BetaParam(double value) : value_(value) {
    if (!(value > -1.0)) {
      throw std::domain_error("specfun.BetaParam: shape must be > -1, got " +
                              std::to_string(value));
    }
  }
  double value() const { return value_; }

  friend bool operator==(BetaParam a, BetaParam b) {
    return a.value_ == b.value_;
  }

 private:
  double value_;
};

// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("specfun.log_gamma: argument must be > 0, got " +
                            std::to_string(x));
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // avoids the signgam global
#else
  return std::lgamma(x);
#endif
}

// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
inline double ball_volume(int d) {
  if (d < 0) {
    throw std::domain_error("specfun.ball_volume: dimension must be >= 0");
  }
  constexpr double kLogPi = 1.1447298858494001741;
  return std::exp(0.5 * d * kLogPi - log_gamma(0.5 * d + 1.0));
}

// log c_{d,beta} with c_{d,beta} = Gamma(d/2+beta+1) / (pi^{d/2} Gamma(beta+1)).
// d = 0 is allowed (c_{0,beta} = 1); the c_d / c_{d-1} ratios need it.
inline double log_beta_norm_const(int d, BetaParam beta) {
  if (d < 0) {
    throw std::domain_error(
        "specfun.beta_norm_const: dimension must be >= 0");
  }
  constexpr double kLogPi = 1.1447298858494001741;
  const double b = beta.value();
  return log_gamma(0.5 * d + b + 1.0) - 0.5 * d * kLogPi - log_gamma(b + 1.0);
}

inline double beta_norm_const(int d, BetaParam beta) {
  return std::exp(log_beta_norm_const(d, beta));
}

// Density f_{d,beta}(x) = c_{d,beta} (1 - |x|^2)^beta, zero outside the ball.
// squared_norm is |x|^2. For beta < 0 the value diverges at the boundary;
// callers only evaluate strictly inside.
inline double beta_density_from_sqnorm(int d, BetaParam beta,
                                       double squared_norm) {
  const double t = 1.0 - squared_norm;
  if (t < 0.0) return 0.0;
  return beta_norm_const(d, beta) * std::pow(t, beta.value());
}

template <typename Container>
double beta_density(int d, BetaParam beta, const Container& x) {
  double sq = 0.0;
  for (double xi : x) sq += xi * xi;
  return beta_density_from_sqnorm(d, beta, sq);
}

namespace detail {

// Continued fraction for I_t(a,b), modified Lentz scheme.
// Converges fast for t < (a+1)/(a+b+2); the caller flips otherwise.
inline double inc_beta_cf(double a, double b, double t) {
  constexpr double kTiny = 1e-300;
  constexpr double kTol = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * t / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * t / ((qam + m2) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    result *= d * c;
    num = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    result *= delta;
    if (std::fabs(delta - 1.0) < kTol) return result;
  }
  throw std::runtime_error(
      "specfun.reg_inc_beta: continued fraction did not converge within 500 "
      "iterations (a=" +
      std::to_string(a) + ", b=" + std::to_string(b) +
      ", t=" + std::to_string(t) + ")");
}

}  // namespace detail

// Regularized incomplete beta I_t(a,b) for a,b > 0, t in [0,1].
inline double reg_inc_beta(double a, double b, double t) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error(
        "specfun.reg_inc_beta: shape parameters must be > 0 (a=" +
        std::to_string(a) + ", b=" + std::to_string(b) + ")");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("specfun.reg_inc_beta: t must lie in [0,1], got " +
                            std::to_string(t));
  }
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                           a * std::log(t) + b * std::log1p(-t);
  if (t < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::inc_beta_cf(a, b, t) / a;
  }
  return 1.0 - std::exp(log_front) * detail::inc_beta_cf(b, a, 1.0 - t) / b;
}

// reg_inc_beta with the complement 1-t supplied exactly by the caller.
// Needed when t is exponentially close to an endpoint: computing 1-t from
// the double t would round the small side to zero long before the true
// value becomes negligible.
inline double reg_inc_beta(double a, double b, double t, double tc) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error(
        "specfun.reg_inc_beta: shape parameters must be > 0 (a=" +
        std::to_string(a) + ", b=" + std::to_string(b) + ")");
  }
  if (!(t >= 0.0) || !(tc >= 0.0)) {
    throw std::domain_error(
        "specfun.reg_inc_beta: t and 1-t must be nonnegative");
  }
  if (t == 0.0) return 0.0;
  if (tc == 0.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                           a * std::log(t) + b * std::log(tc);
  if (t < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * detail::inc_beta_cf(a, b, t) / a;
  }
  return 1.0 - std::exp(log_front) * detail::inc_beta_cf(b, a, tc) / b;
}

// F_beta(h) = c_{1,beta} * Integral_{-1}^{h} (1 - x^2)^beta dx, the CDF of
// the one-dimensional ball density. Equals I_{(h+1)/2}(beta+1, beta+1).
// Arguments outside [-1,1] clamp to 0 or 1.
inline double beta_cdf(BetaParam beta, double h) {
  if (h <= -1.0) return 0.0;
  if (h >= 1.0) return 1.0;
  const double s = beta.value() + 1.0;
  return reg_inc_beta(s, s, 0.5 * (h + 1.0));
}

// CDF variant taking the exact distances 1-h and 1+h to the interval ends;
// the plain overload loses them to rounding once |h| is within 1e-16 of 1,
// which matters for quadrature nodes clustered at the endpoints.
inline double beta_cdf_ends(BetaParam beta, double one_minus_h,
                            double one_plus_h) {
  if (one_plus_h <= 0.0) return 0.0;
  if (one_minus_h <= 0.0) return 1.0;
  const double s = beta.value() + 1.0;
  return reg_inc_beta(s, s, 0.5 * one_plus_h, 0.5 * one_minus_h);
}

}  // namespace betapoly

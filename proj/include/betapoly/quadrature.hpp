#pragma once

// Gauss-Jacobi quadrature for integrals of the form
//   Integral_{-1}^{1} (1-h)^alpha (1+h)^beta g(h) dh
// with alpha, beta > -1. The closed-form evaluators only ever need the
// symmetric case alpha = beta = gamma plus an asymmetric variant that
// absorbs |h|^a factors after the substitution u = h^2.
//
// Nodes and weights come from the symmetric tridiagonal Jacobi-matrix
// eigenproblem (Golub-Welsch); the QL sweep tracks only the first row of
// the eigenvector matrix, which is all the weights need.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "betapoly/specfun.hpp"

namespace betapoly {

struct QuadratureRule {
  double gamma = 0.0;           // weight exponent, (1-h^2)^gamma
  std::vector<double> nodes;    // strictly increasing, inside (-1,1)
  std::vector<double> weights;  // all positive, sum = total weight mass
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;  // last successive difference
};

class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double last, double previous)
      : std::runtime_error(what), last_value(last), previous_value(previous) {}
  double last_value;
  double previous_value;
};

namespace detail {

// Implicit-QL eigenvalue sweep for a symmetric tridiagonal matrix,
// accumulating the first component of each eigenvector into z.
// diag/offdiag are overwritten; offdiag[m-1] is workspace.
inline void tridiag_ql_first_row(std::vector<double>& diag,
                                 std::vector<double>& offdiag,
                                 std::vector<double>& z) {
  const int n = static_cast<int>(diag.size());
  if (n == 1) return;
  const double eps = 2.220446049250313e-16;
  offdiag[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      int m = l;
      while (m < n - 1) {
        const double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(offdiag[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > 50) {
        throw std::runtime_error(
            "quadrature.jacobi_rule: QL iteration failed to converge");
      }
      double g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + offdiag[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * offdiag[i];
        const double b = c * offdiag[i];
        r = std::hypot(f, g);
        offdiag[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          offdiag[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (underflow) continue;
      diag[l] -= p;
      offdiag[l] = g;
      offdiag[m] = 0.0;
    }
  }
}

// m-point rule for the weight (1-x)^alpha (1+x)^beta on [-1,1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_jacobi(
    double alpha, double beta, int m) {
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw std::domain_error(
        "quadrature.jacobi_rule: weight exponents must be > -1 (alpha=" +
        std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  }
  if (m < 1) {
    throw std::domain_error("quadrature.jacobi_rule: need at least 1 node");
  }
  const double ab = alpha + beta;
  const double mu0 =
      std::exp((ab + 1.0) * 0.6931471805599453094 + log_gamma(alpha + 1.0) +
               log_gamma(beta + 1.0) - log_gamma(ab + 2.0));

  // Monic three-term recurrence coefficients of the Jacobi polynomials.
  std::vector<double> diag(m), offdiag(m, 0.0);
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < m; ++k) {
    const double two_k = 2.0 * k + ab;
    diag[k] = (beta - alpha) * (beta + alpha) / (two_k * (two_k + 2.0));
    double bk2;
    if (k == 1) {
      bk2 = 4.0 * (alpha + 1.0) * (beta + 1.0) /
            ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      bk2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
            (two_k * two_k * (two_k + 1.0) * (two_k - 1.0));
    }
    offdiag[k - 1] = std::sqrt(bk2);
  }

  std::vector<double> z(m, 0.0);
  z[0] = 1.0;
  try {
    tridiag_ql_first_row(diag, offdiag, z);
  } catch (const std::runtime_error&) {
    throw std::runtime_error(
        "quadrature.jacobi_rule: eigen-solve did not converge (m=" +
        std::to_string(m) + ", alpha=" + std::to_string(alpha) +
        ", beta=" + std::to_string(beta) + ")");
  }

  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return diag[a] < diag[b]; });

  std::vector<double> nodes(m), weights(m);
  for (int i = 0; i < m; ++i) {
    nodes[i] = diag[order[i]];
    weights[i] = mu0 * z[order[i]] * z[order[i]];
  }
  return {std::move(nodes), std::move(weights)};
}

// Adaptive doubling m = 16, 32, ..., 2048 on the general Jacobi weight.
template <typename Fn>
IntegralResult integrate_jacobi(double alpha, double beta, Fn&& g,
                                double rel_tol) {
  if (!(rel_tol > 0.0)) {
    throw std::domain_error(
        "quadrature.integrate_weighted: rel_tol must be > 0");
  }
  constexpr int kFirst = 16;
  constexpr int kLast = 2048;
  constexpr double kFloor = 1e-300;

  double last = 0.0;      // value at the most recent m
  double before = 0.0;    // value at m/2
  bool have_last = false;
  for (int m = kFirst; m <= kLast; m *= 2) {
    const auto [nodes, weights] = gauss_jacobi(alpha, beta, m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += weights[i] * g(nodes[i]);
    if (have_last) {
      const double diff = std::fabs(sum - last);
      const double scale = std::max(std::fabs(sum), kFloor);
      if (diff <= rel_tol * scale) return {sum, diff};
    }
    before = last;
    last = sum;
    have_last = true;
  }
  throw convergence_error(
      "quadrature.integrate_weighted: no convergence by m=2048 (last=" +
          std::to_string(last) + ", previous=" + std::to_string(before) +
          ")",
      last, before);
}

// Tanh-sinh (double-exponential) fallback for integrands whose non-weight
// factor itself has algebraic endpoint behaviour: incomplete-beta CDF
// factors behave like (1 -/+ h)^(beta+1) at the ends, and for beta+1 < 1
// their derivatives blow up there, degrading the Gauss-Jacobi doubling to
// an algebraic rate that cannot reach tight tolerances by m = 2048. The
// substitution x = tanh((pi/2) sinh u) clusters trapezoid nodes doubly
// exponentially and restores fast convergence for any endpoint exponents
// > -1. The integrand is called as g(x, 1-x, 1+x) with the end distances
// computed exactly, since the nodes approach the ends far below the double
// resolution of x itself.
template <typename Fn3>
IntegralResult integrate_tanh_sinh(double alpha, double beta, Fn3&& g,
                                   double rel_tol) {
  constexpr double kHalfPi = 1.5707963267948966192;
  constexpr double kLog2 = 0.6931471805599453094;

  // Weight, Jacobian and end distances at u, assembled in logs: a negative
  // exponent's blow-up is always dominated by the sech^2 decay because the
  // combined tail exponents alpha+1 and beta+1 stay positive.
  const auto node_term = [&](double u) -> double {
    const double t = kHalfPi * std::sinh(u);
    const double at = std::fabs(t);
    if (at > 350.0) return 0.0;  // end distances would denormalize
    const double e = std::exp(-2.0 * at);
    const double near_end = 2.0 * e / (1.0 + e);
    const double far_end = 2.0 / (1.0 + e);
    const double one_minus = t >= 0.0 ? near_end : far_end;
    const double one_plus = t >= 0.0 ? far_end : near_end;
    const double magnitude = (1.0 - e) / (1.0 + e);
    const double x = t >= 0.0 ? magnitude : -magnitude;
    const double log_jacobian = std::log(kHalfPi * std::cosh(u)) +
                                2.0 * (kLog2 - at - std::log1p(e));
    const double log_weight = alpha * std::log(one_minus) +
                              beta * std::log(one_plus) + log_jacobian;
    const double gv = g(x, one_minus, one_plus);
    if (gv == 0.0) return 0.0;
    return std::exp(log_weight) * gv;
  };

  double last = 0.0;
  double before = 0.0;
  bool have_last = false;
  for (int level = 2; level <= 12; ++level) {
    const double step = std::ldexp(1.0, -level);
    double sum = node_term(0.0);
    for (int side = -1; side <= 1; side += 2) {
      int negligible_run = 0;
      for (int k = 1; k * step <= 7.0; ++k) {
        const double term = node_term(side * k * step);
        sum += term;
        if (std::fabs(term) <= 1e-18 * std::fabs(sum) + 1e-320) {
          // Only trust smallness in the tail; the integrand may pass
          // through zero nearer the centre.
          if (k * step >= 1.0 && ++negligible_run >= 3) break;
        } else {
          negligible_run = 0;
        }
      }
    }
    const double value = step * sum;
    if (have_last) {
      const double diff = std::fabs(value - last);
      if (diff <= rel_tol * std::max(std::fabs(value), 1e-300)) {
        return {value, diff};
      }
    }
    before = last;
    last = value;
    have_last = true;
  }
  throw convergence_error(
      "quadrature.integrate_tanh_sinh: trapezoid refinement stalled (last=" +
          std::to_string(last) + ", previous=" + std::to_string(before) + ")",
      last, before);
}

// Gauss-Jacobi doubling first (fast when the integrand is smooth enough),
// tanh-sinh on non-convergence. Callers pass the three-argument integrand
// form so the fallback gets exact end distances.
template <typename Fn3>
IntegralResult integrate_jacobi_robust(double alpha, double beta, Fn3&& g,
                                       double rel_tol) {
  try {
    return integrate_jacobi(
        alpha, beta, [&g](double x) { return g(x, 1.0 - x, 1.0 + x); },
        rel_tol);
  } catch (const convergence_error&) {
    return integrate_tanh_sinh(alpha, beta, g, rel_tol);
  }
}

}  // namespace detail

// m-point rule for the symmetric weight (1-h^2)^gamma, exact for
// polynomials of degree <= 2m-1.
inline QuadratureRule jacobi_rule(double gamma, int m) {
  auto [nodes, weights] = detail::gauss_jacobi(gamma, gamma, m);
  return {gamma, std::move(nodes), std::move(weights)};
}

// Integral_{-1}^{1} (1-h^2)^gamma g(h) dh with g smooth and bounded.
inline IntegralResult integrate_weighted(
    double gamma, const std::function<double(double)>& g,
    double rel_tol = 1e-11) {
  return detail::integrate_jacobi(gamma, gamma, g, rel_tol);
}

}  // namespace betapoly

#pragma once

// Closed-form expectations for convex hulls of independent, non-identically
// beta-distributed points: the Ruben-Miles simplex moments, the expected
// hull volume, the expected Wieacker facet functional T_{a,b}, the equal-
// parameter volume formula, the hyperplane-section value, and the Kubota
// consistency identity that ties volume and T together one dimension up.
//
// Every gamma-ratio product is accumulated as a sum of log-gamma values and
// exponentiated once; the raw gammas overflow already for moderate d.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "betapoly/quadrature.hpp"
#include "betapoly/specfun.hpp"

namespace betapoly {

class budget_error : public std::runtime_error {
 public:
  budget_error(const std::string& what, std::uint64_t groups,
               std::uint64_t cap)
      : std::runtime_error(what), group_count(groups), budget(cap) {}
  std::uint64_t group_count;
  std::uint64_t budget;
};

// Ordered list of per-point shape exponents, each > -1.
class BetaVector {
 public:
  explicit BetaVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw std::domain_error("closedform.BetaVector: need at least 1 entry");
    }
    for (double v : values_) (void)BetaParam(v);
  }
  BetaVector(std::initializer_list<double> values)
      : BetaVector(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// The random polytope: convex hull of n independent points in R^d, the
// i-th drawn from the ball density with exponent betas[i].
struct PolytopeSpec {
  PolytopeSpec(int d, BetaVector b) : dimension(d), betas(std::move(b)) {
    if (d < 1) {
      throw std::domain_error("closedform.PolytopeSpec: dimension must be >= 1");
    }
  }
  int dimension;
  BetaVector betas;

  std::size_t point_count() const { return betas.size(); }
};

// Exponents of the facet functional: distance from the origin to the
// facet's affine hull raised to `distance_exponent`, facet (d-1)-volume
// raised to `volume_exponent`. Negative exponents can make the h-integral
// diverge at h = 0 and are rejected.
struct WieackerParams {
  WieackerParams(double a, double b)
      : distance_exponent(a), volume_exponent(b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
      throw std::domain_error(
          "closedform.WieackerParams: exponents must be >= 0 (a=" +
          std::to_string(a) + ", b=" + std::to_string(b) + ")");
    }
  }
  double distance_exponent;
  double volume_exponent;
};

// One equivalence class of index subsets: every subset selecting this
// multiset of beta values (and therefore leaving the same complement)
// contributes an identical term.
struct SubsetGroup {
  std::vector<double> selected;                    // sorted, size r
  std::vector<std::pair<double, int>> complement;  // distinct value -> count
  std::uint64_t multiplicity = 0;
};

struct EvalOptions {
  double rel_tol = 1e-11;
  std::uint64_t group_budget = 10'000'000;
  int threads = 1;
};

// Closed-form value plus the bookkeeping the CLI reports.
struct ClosedFormResult {
  double value = 0.0;
  double quadrature_error = 0.0;
  std::uint64_t term_count = 0;
};

namespace detail {

inline double log_ball_volume(int d) {
  constexpr double kLogPi = 1.1447298858494001741;
  return 0.5 * d * kLogPi - log_gamma(0.5 * d + 1.0);
}

inline std::uint64_t checked_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (result > UINT64_MAX / factor) {
      throw std::overflow_error(
          "closedform.enumerate_subsets_grouped: multiplicity overflow");
    }
    result = result * factor / i;  // divisible at every step
  }
  return result;
}

// Runs fn(0..count-1) on up to `threads` workers. Slot-indexed output keeps
// results independent of scheduling; the first exception wins.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (count == 0) return;
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    std::size_t i;
    while ((i = next.fetch_add(1)) < count) {
      if (failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline double log_miles_moment(const std::vector<double>& betas, double k) {
  const double n = static_cast<double>(betas.size());
  double beta_sum = 0.0;
  for (double b : betas) beta_sum += b;

  double log_value = -k * log_gamma(n);  // ((n-1)!)^{-k}
  log_value += log_gamma(0.5 * n * (n - 1.0 + k) + beta_sum + 1.0) -
               log_gamma(0.5 * (n - 1.0) * (n + k) + beta_sum + 1.0);
  for (std::size_t j = 1; j < betas.size(); ++j) {
    log_value += log_gamma(0.5 * (j + k)) - log_gamma(0.5 * j);
  }
  for (double b : betas) {
    log_value += log_gamma(0.5 * (n - 1.0) + b + 1.0) -
                 log_gamma(0.5 * (n - 1.0 + k) + b + 1.0);
  }
  return log_value;
}

// Product of the half-space CDFs over the complement of a subset group,
// one incomplete-beta evaluation per distinct value.
class CdfProductIntegrand {
 public:
  CdfProductIntegrand(const std::vector<std::pair<double, int>>& complement,
                      int d) {
    const double shift = 0.5 * (d - 1);
    shifted_.reserve(complement.size());
    for (const auto& [value, count] : complement) {
      shifted_.emplace_back(BetaParam(value + shift), count);
    }
  }

  // The end distances 1-h and 1+h arrive separately because quadrature
  // nodes can sit exponentially close to the endpoints, where the CDF's
  // value is carried entirely by the small side.
  double operator()(double, double one_minus_h, double one_plus_h) const {
    double product = 1.0;
    for (const auto& [param, count] : shifted_) {
      product *= std::pow(beta_cdf_ends(param, one_minus_h, one_plus_h),
                          count);
    }
    return product;
  }

  double operator()(double h) const { return (*this)(h, 1.0 - h, 1.0 + h); }

 private:
  std::vector<std::pair<BetaParam, int>> shifted_;
};

// Integral_{-1}^{1} |h|^a (1-h^2)^gamma g(h) dh for a >= 0 and even g-free
// shape. For a = 0 this is the plain symmetric rule. Any other a makes
// |h|^a non-smooth at 0, so substitute u = h^2: the even part of g becomes
// an analytic function of u and the |h|^a factor moves into an asymmetric
// Jacobi weight with exponents (gamma, (a-1)/2). Spectral accuracy either
// way.
template <typename Fn>
IntegralResult integrate_abs_power_weighted(double a, double gamma, Fn&& g,
                                            double rel_tol) {
  if (a == 0.0) {
    return integrate_jacobi_robust(gamma, gamma, g, rel_tol);
  }
  const double exponent_at_zero = 0.5 * (a - 1.0);
  auto folded = [&g](double, double one_minus_t, double one_plus_t) {
    const double u = 0.5 * one_plus_t;
    const double h = std::sqrt(u);
    // 1 - sqrt(u) = (1-u) / (1+sqrt(u)) keeps the end distance exact.
    const double margin = 0.5 * one_minus_t / (1.0 + h);
    return g(h, margin, 1.0 + h) + g(-h, 1.0 + h, margin);
  };
  IntegralResult inner =
      integrate_jacobi_robust(gamma, exponent_at_zero, folded, rel_tol);
  const double scale = std::exp2(-gamma - 0.5 * (a + 3.0));
  return {scale * inner.value, scale * inner.error_estimate};
}

struct TermResult {
  double value = 0.0;
  double error = 0.0;
};

// One expected-volume term (prefactor included), for a (d+1)-subset group.
inline TermResult volume_group_term(int d, const SubsetGroup& group,
                                    double rel_tol) {
  constexpr double kLogPi = 1.1447298858494001741;
  double selected_sum = 0.0;
  double log_factor = log_ball_volume(d) - 0.5 * (d + 1) * kLogPi -
                      d * 0.6931471805599453094;
  for (double b : group.selected) {
    selected_sum += b;
    log_factor += log_gamma(0.5 * (d + 2) + b) - log_gamma(0.5 * (d + 3) + b);
  }
  const double weight_exponent = selected_sum + 0.5 * (d * d + 2 * d - 1);
  const CdfProductIntegrand integrand(group.complement, d);
  const IntegralResult integral = integrate_jacobi_robust(
      weight_exponent, weight_exponent, integrand, rel_tol);
  const double coefficient =
      (0.5 * (d + 1) * (d + 1) + selected_sum) * std::exp(log_factor);
  return {coefficient * integral.value,
          std::fabs(coefficient) * integral.error_estimate};
}

// One facet-functional term (prefactor included), for a d-subset group.
inline TermResult wieacker_group_term(int d, const WieackerParams& params,
                                      const SubsetGroup& group,
                                      double rel_tol) {
  double selected_sum = 0.0;
  double log_factor = log_gamma(d + 1.0) + log_ball_volume(d);  // d! kappa_d
  for (double b : group.selected) {
    selected_sum += b;
    log_factor += log_beta_norm_const(d, BetaParam(b)) -
                  log_beta_norm_const(d - 1, BetaParam(b));
  }
  log_factor +=
      log_miles_moment(group.selected, params.volume_exponent + 1.0);
  const double weight_exponent =
      selected_sum + 0.5 * (d - 1) * (d + params.volume_exponent + 1.0);
  const CdfProductIntegrand integrand(group.complement, d);
  const IntegralResult integral = integrate_abs_power_weighted(
      params.distance_exponent, weight_exponent, integrand, rel_tol);
  const double coefficient = std::exp(log_factor);
  return {coefficient * integral.value,
          coefficient * integral.error_estimate};
}

template <typename TermFn>
ClosedFormResult sum_groups(const std::vector<SubsetGroup>& groups,
                            int threads, TermFn&& term_fn) {
  std::vector<TermResult> terms(groups.size());
  parallel_for(groups.size(), threads,
               [&](std::size_t i) { terms[i] = term_fn(groups[i]); });
  // Deterministic reduction: group enumeration order is canonical, so the
  // sum is bit-identical for any thread count.
  ClosedFormResult result;
  result.term_count = groups.size();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double mult = static_cast<double>(groups[i].multiplicity);
    result.value += mult * terms[i].value;
    result.quadrature_error += mult * terms[i].error;
  }
  return result;
}

}  // namespace detail

// Partitions the C(n,r) index subsets into groups selecting identical beta
// multisets (the complement multiset is then identical too). Terms of the
// closed-form sums depend only on these multisets, so each group is
// evaluated once and weighted by its subset count.
inline std::vector<SubsetGroup> enumerate_subsets_grouped(
    const BetaVector& betas, std::size_t r,
    std::uint64_t group_budget = 10'000'000) {
  const std::size_t n = betas.size();
  if (r < 1 || r > n) {
    throw std::domain_error(
        "closedform.enumerate_subsets_grouped: need 1 <= r <= n");
  }
  // Distinct values with counts, ascending.
  std::vector<double> sorted = betas.values();
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, int>> distinct;
  for (double v : sorted) {
    if (!distinct.empty() && distinct.back().first == v) {
      ++distinct.back().second;
    } else {
      distinct.emplace_back(v, 1);
    }
  }

  std::vector<SubsetGroup> groups;
  std::vector<int> chosen(distinct.size(), 0);

  std::function<void(std::size_t, std::size_t)> recurse =
      [&](std::size_t index, std::size_t remaining) {
        if (index == distinct.size()) {
          if (remaining != 0) return;
          SubsetGroup group;
          group.multiplicity = 1;
          for (std::size_t j = 0; j < distinct.size(); ++j) {
            const auto& [value, count] = distinct[j];
            for (int c = 0; c < chosen[j]; ++c) {
              group.selected.push_back(value);
            }
            if (count - chosen[j] > 0) {
              group.complement.emplace_back(value, count - chosen[j]);
            }
            const std::uint64_t ways =
                detail::checked_binomial(count, chosen[j]);
            if (group.multiplicity > UINT64_MAX / ways) {
              throw std::overflow_error(
                  "closedform.enumerate_subsets_grouped: multiplicity "
                  "overflow");
            }
            group.multiplicity *= ways;
          }
          if (groups.size() >= group_budget) {
            throw budget_error(
                "closedform.enumerate_subsets_grouped: distinct-group count "
                "exceeds budget of " +
                    std::to_string(group_budget),
                groups.size() + 1, group_budget);
          }
          groups.push_back(std::move(group));
          return;
        }
        // Feasibility pruning keeps the recursion linear in group count.
        std::size_t capacity_after = 0;
        for (std::size_t j = index + 1; j < distinct.size(); ++j) {
          capacity_after += distinct[j].second;
        }
        const int max_here =
            std::min<std::size_t>(distinct[index].second, remaining);
        for (int c = 0; c <= max_here; ++c) {
          if (remaining - c > capacity_after) continue;
          chosen[index] = c;
          recurse(index + 1, remaining - c);
        }
        chosen[index] = 0;
      };
  recurse(0, r);
  return groups;
}

// k-th moment of the (n-1)-volume of the simplex spanned by n independent
// beta points spanning R^{n-1} (Ruben-Miles). The empty products make the
// n = 1 value exactly 1. Integer k is the proven regime; real k >= 0 is the
// analytic continuation used for fractional volume exponents.
inline double miles_moment(const BetaVector& betas, double k) {
  if (!(k >= 0.0)) {
    throw std::domain_error("closedform.miles_moment: order must be >= 0");
  }
  return std::exp(detail::log_miles_moment(betas.values(), k));
}

// Expected d-volume of the hull of n >= d+1 beta points.
inline ClosedFormResult expected_volume_detailed(const PolytopeSpec& spec,
                                                 const EvalOptions& options =
                                                     {}) {
  const int d = spec.dimension;
  if (spec.point_count() < static_cast<std::size_t>(d) + 1) {
    throw std::domain_error(
        "closedform.expected_volume: need n >= d+1 points (n=" +
        std::to_string(spec.point_count()) + ", d=" + std::to_string(d) + ")");
  }
  const auto groups =
      enumerate_subsets_grouped(spec.betas, d + 1, options.group_budget);
  return detail::sum_groups(groups, options.threads,
                            [&](const SubsetGroup& group) {
                              return detail::volume_group_term(
                                  d, group, options.rel_tol);
                            });
}

inline double expected_volume(const PolytopeSpec& spec,
                              const EvalOptions& options = {}) {
  return expected_volume_detailed(spec, options).value;
}

// Expected Wieacker functional E T_{a,b}^{d-1,d} over the facets.
inline ClosedFormResult expected_wieacker_detailed(
    const PolytopeSpec& spec, const WieackerParams& params,
    const EvalOptions& options = {}) {
  const int d = spec.dimension;
  if (spec.point_count() < static_cast<std::size_t>(d)) {
    throw std::domain_error(
        "closedform.expected_wieacker: need n >= d points (n=" +
        std::to_string(spec.point_count()) + ", d=" + std::to_string(d) + ")");
  }
  const auto groups =
      enumerate_subsets_grouped(spec.betas, d, options.group_budget);
  return detail::sum_groups(groups, options.threads,
                            [&](const SubsetGroup& group) {
                              return detail::wieacker_group_term(
                                  d, params, group, options.rel_tol);
                            });
}

inline double expected_wieacker(const PolytopeSpec& spec,
                                const WieackerParams& params,
                                const EvalOptions& options = {}) {
  return expected_wieacker_detailed(spec, params, options).value;
}

// Equal-parameter expected volume (the single-beta special case), kept as
// an independent identity check against expected_volume.
inline double ktt_equal_beta(int d, std::size_t n, BetaParam beta,
                             double rel_tol = 1e-11) {
  if (d < 1) {
    throw std::domain_error("closedform.ktt_equal_beta: dimension must be >= 1");
  }
  if (n < static_cast<std::size_t>(d) + 1) {
    throw std::domain_error("closedform.ktt_equal_beta: need n >= d+1");
  }
  constexpr double kLogPi = 1.1447298858494001741;
  const double b = beta.value();
  const double nd = static_cast<double>(n);

  double log_factor = detail::log_ball_volume(d) - 0.5 * (d + 1) * kLogPi -
                      d * 0.6931471805599453094;
  log_factor += log_gamma(nd + 1.0) - log_gamma(d + 2.0) -
                log_gamma(nd - d);  // C(n, d+1)
  log_factor += (d + 1) * (log_gamma(0.5 * (d + 2) + b) -
                           log_gamma(0.5 * (d + 3) + b));

  const double weight_exponent = (d + 1) * b + 0.5 * (d * d + 2 * d - 1);
  const int cdf_power = static_cast<int>(n) - d - 1;
  const BetaParam shifted(b + 0.5 * (d - 1));
  const IntegralResult integral = detail::integrate_jacobi_robust(
      weight_exponent, weight_exponent,
      [&](double, double one_minus_h, double one_plus_h) {
        return std::pow(beta_cdf_ends(shifted, one_minus_h, one_plus_h),
                        cdf_power);
      },
      rel_tol);

  return (d + 1) * (0.5 * (d + 1) + b) * std::exp(log_factor) *
         integral.value;
}

// Right-hand side of the hyperplane-section identity: the density of d beta
// points landing on a hyperplane at distance h from the origin, weighted by
// the k-th power of their (d-1)-volume.
inline double lemma_section_value(int d, const BetaVector& betas,
                                  double k, double h) {
  if (d < 1) {
    throw std::domain_error(
        "closedform.lemma_section_value: dimension must be >= 1");
  }
  if (betas.size() != static_cast<std::size_t>(d)) {
    throw std::domain_error(
        "closedform.lemma_section_value: need exactly d beta entries");
  }
  if (!(std::fabs(h) < 1.0)) {
    throw std::domain_error(
        "closedform.lemma_section_value: need |h| < 1");
  }
  double log_factor = detail::log_miles_moment(betas.values(), k);
  double beta_sum = 0.0;
  for (double b : betas.values()) {
    beta_sum += b;
    log_factor += log_beta_norm_const(d, BetaParam(b)) -
                  log_beta_norm_const(d - 1, BetaParam(b));
  }
  const double exponent = beta_sum + 0.5 * (d - 1) * (k + d);
  return std::exp(log_factor) * std::pow(1.0 - h * h, exponent);
}

struct KubotaCheck {
  double volume_route = 0.0;    // expected_volume in dimension d
  double wieacker_route = 0.0;  // T_{0,1} in dimension d+1, betas - 1/2
};

// E Vol_d(P_{n,d}) computed two ways: directly, and through the Kubota
// projection identity via T_{0,1} of the lifted polytope one dimension up
// with every exponent shifted by -1/2. Requires all betas > -1/2 so the
// shift stays admissible.
inline KubotaCheck kubota_cross_check(const PolytopeSpec& spec,
                                      const EvalOptions& options = {}) {
  for (double b : spec.betas.values()) {
    if (!(b > -0.5)) {
      throw std::domain_error(
          "closedform.kubota_cross_check: every beta must be > -1/2, got " +
          std::to_string(b));
    }
  }
  const int d = spec.dimension;
  std::vector<double> shifted = spec.betas.values();
  for (double& b : shifted) b -= 0.5;

  KubotaCheck check;
  check.volume_route = expected_volume(spec, options);
  const PolytopeSpec lifted(d + 1, BetaVector(std::move(shifted)));
  const double t_value =
      expected_wieacker(lifted, WieackerParams(0.0, 1.0), options);
  check.wieacker_route = std::exp(detail::log_ball_volume(d) -
                                  detail::log_ball_volume(d + 1)) /
                         (d + 1) * t_value;
  return check;
}

}  // namespace betapoly

#pragma once

// Seedable sampling of beta-distributed points in the unit ball (and the
// sphere-uniform limit), plus the empirical projection / half-space
// estimators the distributional tests rely on.
//
// A point with density proportional to (1-|x|^2)^beta factors into a
// uniform direction and an independent radius with R^2 ~ Beta(d/2, beta+1);
// both pieces come from hand-rolled Gaussian and gamma variates so the
// sequence for a given (seed, stream) is pinned down by this header alone,
// not by a standard-library distribution implementation.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "betapoly/closedform.hpp"
#include "betapoly/specfun.hpp"

namespace betapoly {

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform_open() {  // (0, 1)
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Standard normal via the Marsaglia polar method, pairs cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shapes below 1 are lifted
  // by one and corrected with a power of a uniform.
  double gamma(double shape) {
    if (!(shape > 0.0)) {
      throw std::domain_error("sampling.gamma: shape must be > 0, got " +
                              std::to_string(shape));
    }
    if (shape < 1.0) {
      const double boost = std::pow(uniform_open(), 1.0 / shape);
      return gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Beta(p, q) as a normalized gamma pair.
  double beta(double p, double q) {
    for (;;) {
      const double g1 = gamma(p);
      const double g2 = gamma(q);
      const double sum = g1 + g2;
      if (sum > 0.0) return g1 / sum;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over a stream-offset state.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Uniform direction: normalized standard Gaussian vector.
inline std::vector<double> sample_sphere_point(int d, RandomSource& rng) {
  if (d < 1) {
    throw std::domain_error("sampling.sample_sphere_point: d must be >= 1");
  }
  std::vector<double> x(d);
  double norm_sq;
  do {
    norm_sq = 0.0;
    for (double& coord : x) {
      coord = rng.normal();
      norm_sq += coord * coord;
    }
  } while (norm_sq == 0.0);
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (double& coord : x) coord *= inv_norm;
  return x;
}

// Ball point with density c_{d,beta} (1-|x|^2)^beta: uniform direction
// scaled by R = sqrt(S), S ~ Beta(d/2, beta+1).
inline std::vector<double> sample_beta_point(int d, BetaParam beta,
                                             RandomSource& rng) {
  std::vector<double> x = sample_sphere_point(d, rng);
  const double radius = std::sqrt(rng.beta(0.5 * d, beta.value() + 1.0));
  for (double& coord : x) coord *= radius;
  return x;
}

inline std::vector<double> project_first_k(const std::vector<double>& x,
                                           std::size_t k) {
  if (k < 1 || k > x.size()) {
    throw std::domain_error("sampling.project_first_k: need 1 <= k <= d");
  }
  return std::vector<double>(x.begin(), x.begin() + k);
}

// Fraction of draws whose last coordinate exceeds h; estimates the upper
// half-space probability 1 - F_{beta+(d-1)/2}(h).
inline double empirical_halfspace_prob(int d, BetaParam beta, double h,
                                       std::size_t n_samples,
                                       RandomSource& rng) {
  if (n_samples < 1) {
    throw std::domain_error("sampling.empirical_halfspace_prob: need N >= 1");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::vector<double> x = sample_beta_point(d, beta, rng);
    if (x.back() > h) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n_samples);
}

// One or more independent realizations of the full point configuration.
struct SampleBatch {
  int dimension = 0;
  std::size_t points_per_draw = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> coords;  // draw-major, then point-major

  std::size_t draw_count() const {
    const std::size_t stride = points_per_draw * dimension;
    return stride == 0 ? 0 : coords.size() / stride;
  }
  const double* point(std::size_t draw, std::size_t i) const {
    return coords.data() + (draw * points_per_draw + i) * dimension;
  }
};

inline SampleBatch sample_batch(const PolytopeSpec& spec, std::size_t draws,
                                RandomSource& rng) {
  SampleBatch batch;
  batch.dimension = spec.dimension;
  batch.points_per_draw = spec.point_count();
  batch.seed = rng.seed();
  batch.stream = rng.stream();
  batch.coords.reserve(draws * batch.points_per_draw * spec.dimension);
  for (std::size_t draw = 0; draw < draws; ++draw) {
    for (std::size_t i = 0; i < spec.point_count(); ++i) {
      const std::vector<double> x =
          sample_beta_point(spec.dimension, BetaParam(spec.betas[i]), rng);
      batch.coords.insert(batch.coords.end(), x.begin(), x.end());
    }
  }
  return batch;
}

}  // namespace betapoly

#pragma once

// Desk-scale convex-hull geometry in R^d: facet enumeration by the
// brute-force side test over all d-subsets, simplex volumes by Gram
// determinant, the facet functional T_{a,b}, and the seeded Monte Carlo
// estimator that serves as the oracle for the closed forms.
//
// Scale: d <= ~6, n <= ~30. Brute force costs O(C(n,d) * n * d) per hull,
// which is microseconds here and has no degenerate-case cleverness to get
// wrong.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "betapoly/closedform.hpp"
#include "betapoly/sampling.hpp"

namespace betapoly {

// A d-subset whose affine hull has some other point within the side-test
// tolerance: facet membership is undecidable and the draw must be redone.
class degeneracy_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class mc_abort_error : public std::runtime_error {
 public:
  mc_abort_error(const std::string& what, double rate)
      : std::runtime_error(what), degeneracy_rate(rate) {}
  double degeneracy_rate;
};

struct Facet {
  std::vector<int> vertex_indices;  // ascending, size d
  std::vector<double> normal;       // unit, outward
  double offset = 0.0;              // distance from origin to affine hull
};

struct FacetSet {
  int dimension = 0;
  std::vector<Facet> facets;
};

namespace detail {

// Determinant by Gaussian elimination with partial pivoting; destroys a.
inline double determinant_inplace(std::vector<double>& a, int m) {
  double det = 1.0;
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int row = col + 1; row < m; ++row) {
      if (std::fabs(a[row * m + col]) > std::fabs(a[pivot * m + col])) {
        pivot = row;
      }
    }
    if (a[pivot * m + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = 0; j < m; ++j) std::swap(a[pivot * m + j], a[col * m + j]);
      det = -det;
    }
    const double p = a[col * m + col];
    det *= p;
    for (int row = col + 1; row < m; ++row) {
      const double f = a[row * m + col] / p;
      for (int j = col; j < m; ++j) a[row * m + j] -= f * a[col * m + j];
    }
  }
  return det;
}

// Vector orthogonal to the rows of the (d-1) x d edge matrix, by cofactor
// expansion; its length is (d-1)! times the (d-1)-volume of the simplex
// those edges span. For d = 1 the empty expansion gives (1).
inline void cofactor_normal(const std::vector<double>& edges, int d,
                            std::vector<double>& normal,
                            std::vector<double>& minor_scratch) {
  normal.assign(d, 0.0);
  minor_scratch.assign((d - 1) * (d - 1), 0.0);
  for (int skip = 0; skip < d; ++skip) {
    for (int row = 0; row < d - 1; ++row) {
      int out = 0;
      for (int col = 0; col < d; ++col) {
        if (col == skip) continue;
        minor_scratch[row * (d - 1) + out++] = edges[row * d + col];
      }
    }
    const double det = determinant_inplace(minor_scratch, d - 1);
    normal[skip] = (skip % 2 == 0) ? det : -det;
  }
}

// Visits every facet of conv(points): cb(subset, unit_normal, facet_volume)
// with the normal oriented so all other points are on its negative side.
// Points are flat row-major, n x d.
template <typename Cb>
void for_each_facet(const double* pts, int n, int d, Cb&& cb) {
  if (d < 1) throw std::domain_error("geometry.convex_hull_facets: d >= 1");
  if (n < d + 1) {
    throw std::domain_error(
        "geometry.convex_hull_facets: need n >= d+1 points (n=" +
        std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }
  double scale = 0.0;
  for (int i = 0; i < n * d; ++i) scale = std::max(scale, std::fabs(pts[i]));
  const double tol = 1e-10 * std::max(scale, 1e-30);

  std::vector<int> subset(d);
  for (int i = 0; i < d; ++i) subset[i] = i;
  std::vector<double> edges((d - 1) * d), normal(d), minor_scratch;

  for (;;) {
    const double* p0 = pts + subset[0] * d;
    for (int j = 1; j < d; ++j) {
      const double* pj = pts + subset[j] * d;
      for (int c = 0; c < d; ++c) edges[(j - 1) * d + c] = pj[c] - p0[c];
    }
    cofactor_normal(edges, d, normal, minor_scratch);
    double norm_sq = 0.0;
    for (double v : normal) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
      throw degeneracy_error(
          "geometry.convex_hull_facets: affinely dependent facet candidate");
    }
    for (double& v : normal) v /= norm;

    bool above = false, below = false, ambiguous = false;
    for (int q = 0; q < n; ++q) {
      bool in_subset = false;
      for (int j = 0; j < d; ++j) {
        if (subset[j] == q) {
          in_subset = true;
          break;
        }
      }
      if (in_subset) continue;
      const double* pq = pts + q * d;
      double dist = 0.0;
      for (int c = 0; c < d; ++c) dist += normal[c] * (pq[c] - p0[c]);
      if (dist > tol) {
        above = true;
      } else if (dist < -tol) {
        below = true;
      } else {
        ambiguous = true;
      }
      if (above && below) break;  // definitely not a facet
    }
    if (!(above && below)) {
      if (ambiguous) {
        throw degeneracy_error(
            "geometry.convex_hull_facets: side test ambiguous within "
            "tolerance");
      }
      if (above) {  // flip so the hull is on the negative side
        for (double& v : normal) v = -v;
      }
      const double facet_volume = norm / std::tgamma(static_cast<double>(d));
      cb(subset, normal, facet_volume);
    }

    // next d-combination of {0..n-1}
    int k = d - 1;
    while (k >= 0 && subset[k] == n - d + k) --k;
    if (k < 0) break;
    ++subset[k];
    for (int j = k + 1; j < d; ++j) subset[j] = subset[j - 1] + 1;
  }
}

}  // namespace detail

inline FacetSet convex_hull_facets(const std::vector<std::vector<double>>& points) {
  const int n = static_cast<int>(points.size());
  const int d = points.empty() ? 0 : static_cast<int>(points[0].size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n) * d);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != d) {
      throw std::domain_error(
          "geometry.convex_hull_facets: inconsistent point dimensions");
    }
    flat.insert(flat.end(), p.begin(), p.end());
  }
  FacetSet result;
  result.dimension = d;
  detail::for_each_facet(
      flat.data(), n, d,
      [&](const std::vector<int>& subset, const std::vector<double>& normal,
          double) {
        Facet facet;
        facet.vertex_indices = subset;
        facet.normal = normal;
        double plane_offset = 0.0;
        for (int c = 0; c < d; ++c) {
          plane_offset += normal[c] * flat[subset[0] * d + c];
        }
        facet.offset = std::fabs(plane_offset);
        result.facets.push_back(std::move(facet));
      });
  return result;
}

// m-volume of the simplex on m+1 vertices in R^d (m <= d), via the Gram
// determinant of the edge vectors. Affinely dependent input gives 0.
inline double simplex_volume(const std::vector<std::vector<double>>& vertices) {
  if (vertices.empty()) {
    throw std::domain_error("geometry.simplex_volume: need at least 1 vertex");
  }
  const int m = static_cast<int>(vertices.size()) - 1;
  const int d = static_cast<int>(vertices[0].size());
  if (m > d) {
    throw std::domain_error(
        "geometry.simplex_volume: more vertices than dimension+1");
  }
  if (m == 0) return 1.0;  // 0-volume (counting measure) of a point
  std::vector<double> gram(m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double dot = 0.0;
      for (int c = 0; c < d; ++c) {
        dot += (vertices[i + 1][c] - vertices[0][c]) *
               (vertices[j + 1][c] - vertices[0][c]);
      }
      gram[i * m + j] = dot;
      gram[j * m + i] = dot;
    }
  }
  const double det = detail::determinant_inplace(gram, m);
  if (det <= 0.0) return 0.0;
  double factorial = 1.0;
  for (int i = 2; i <= m; ++i) factorial *= i;
  return std::sqrt(det) / factorial;
}

namespace detail {

inline double polytope_volume_flat(const double* pts, int n, int d) {
  std::vector<double> centroid(d, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) centroid[c] += pts[i * d + c];
  }
  for (double& v : centroid) v /= n;
  double volume = 0.0;
  for_each_facet(pts, n, d,
                 [&](const std::vector<int>& subset,
                     const std::vector<double>& normal, double facet_volume) {
                   const double* p0 = pts + subset[0] * d;
                   double height = 0.0;
                   for (int c = 0; c < d; ++c) {
                     height += normal[c] * (p0[c] - centroid[c]);
                   }
                   volume += facet_volume * height;
                 });
  return volume / d;
}

inline double wieacker_T_flat(const double* pts, int n, int d, double a,
                              double b) {
  double total = 0.0;
  for_each_facet(pts, n, d,
                 [&](const std::vector<int>& subset,
                     const std::vector<double>& normal, double facet_volume) {
                   const double* p0 = pts + subset[0] * d;
                   double plane_offset = 0.0;
                   for (int c = 0; c < d; ++c) plane_offset += normal[c] * p0[c];
                   const double dist = std::fabs(plane_offset);
                   total += std::pow(dist, a) * std::pow(facet_volume, b);
                 });
  return total;
}

inline std::vector<double> flatten(const std::vector<std::vector<double>>& points) {
  std::vector<double> flat;
  if (points.empty()) return flat;
  const std::size_t d = points[0].size();
  flat.reserve(points.size() * d);
  for (const auto& p : points) {
    if (p.size() != d) {
      throw std::domain_error("geometry: inconsistent point dimensions");
    }
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return flat;
}

}  // namespace detail

// Cone decomposition from the vertex centroid: sum over facets of
// (1/d) * Vol_{d-1}(facet) * (signed height of centroid below the facet).
inline double polytope_volume(const std::vector<std::vector<double>>& points) {
  const std::vector<double> flat = detail::flatten(points);
  const int d = points.empty() ? 0 : static_cast<int>(points[0].size());
  return detail::polytope_volume_flat(flat.data(),
                                      static_cast<int>(points.size()), d);
}

// T_{a,b} over the facets: distance-to-origin^a times facet volume^b.
inline double wieacker_T(const std::vector<std::vector<double>>& points,
                         double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw std::domain_error("geometry.wieacker_T: exponents must be >= 0");
  }
  const std::vector<double> flat = detail::flatten(points);
  const int d = points.empty() ? 0 : static_cast<int>(points[0].size());
  return detail::wieacker_T_flat(flat.data(), static_cast<int>(points.size()),
                                 d, a, b);
}

// What the Monte Carlo oracle measures per hull draw. The simplex-moment
// kind (n = d+1 only) backs the moment-formula verification, where the
// measured quantity is Vol^k of the simplex rather than a hull statistic.
struct MCFunctional {
  enum class Kind { volume, wieacker, simplex_moment };
  Kind kind = Kind::volume;
  double a = 0.0;
  double b = 0.0;
  double k = 1.0;

  static MCFunctional volume() { return {}; }
  static MCFunctional wieacker(double a, double b) {
    return {Kind::wieacker, a, b, 1.0};
  }
  static MCFunctional simplex_moment(double k) {
    return {Kind::simplex_moment, 0.0, 0.0, k};
  }
};

struct MCEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t resample_count = 0;
  std::size_t sample_count = 0;
};

namespace detail {

inline double evaluate_functional(const MCFunctional& fn, const double* pts,
                                  int n, int d) {
  switch (fn.kind) {
    case MCFunctional::Kind::volume:
      return polytope_volume_flat(pts, n, d);
    case MCFunctional::Kind::wieacker:
      return wieacker_T_flat(pts, n, d, fn.a, fn.b);
    case MCFunctional::Kind::simplex_moment: {
      std::vector<std::vector<double>> vertices(n);
      for (int i = 0; i < n; ++i) {
        vertices[i].assign(pts + i * d, pts + (i + 1) * d);
      }
      return std::pow(simplex_volume(vertices), fn.k);
    }
  }
  throw std::logic_error("geometry.mc_estimate: unknown functional");
}

inline void fill_beta_points(const PolytopeSpec& spec, RandomSource& rng,
                             double* out) {
  const int d = spec.dimension;
  for (std::size_t i = 0; i < spec.point_count(); ++i) {
    const std::vector<double> x =
        sample_beta_point(d, BetaParam(spec.betas[i]), rng);
    for (int c = 0; c < d; ++c) out[i * d + c] = x[c];
  }
}

}  // namespace detail

// Mean and standard error of the functional over N independent hull draws.
// Work is split into fixed-size batches, one derived RandomSource stream
// per batch and a sequential batch-order reduction, so the estimate is
// bit-identical for every thread count. Degenerate draws are resampled
// within their batch; the run aborts if more than 0.1% of draws degenerate.
inline MCEstimate mc_estimate(const PolytopeSpec& spec,
                              const MCFunctional& functional, std::size_t N,
                              const RandomSource& rng, int threads = 1) {
  if (N < 2) {
    throw std::domain_error("geometry.mc_estimate: need N >= 2");
  }
  const int d = spec.dimension;
  const int n = static_cast<int>(spec.point_count());
  if (functional.kind == MCFunctional::Kind::simplex_moment && n != d + 1) {
    throw std::domain_error(
        "geometry.mc_estimate: simplex moment needs exactly d+1 points");
  }

  constexpr std::size_t kBatch = 4096;
  const std::size_t num_batches = (N + kBatch - 1) / kBatch;
  struct BatchSum {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t resamples = 0;
  };
  std::vector<BatchSum> batch_sums(num_batches);

  detail::parallel_for(num_batches, threads, [&](std::size_t b) {
    RandomSource source(rng.seed(), rng.stream() + 1 + b);
    const std::size_t first = b * kBatch;
    const std::size_t count = std::min(kBatch, N - first);
    std::vector<double> pts(static_cast<std::size_t>(n) * d);
    BatchSum& acc = batch_sums[b];
    for (std::size_t i = 0; i < count; ++i) {
      double value;
      for (;;) {
        detail::fill_beta_points(spec, source, pts.data());
        try {
          value = detail::evaluate_functional(functional, pts.data(), n, d);
          break;
        } catch (const degeneracy_error&) {
          if (++acc.resamples > 10 * kBatch) {
            throw mc_abort_error(
                "geometry.mc_estimate: batch stuck resampling degenerate "
                "configurations",
                1.0);
          }
        }
      }
      acc.sum += value;
      acc.sum_sq += value * value;
    }
  });

  double total = 0.0, total_sq = 0.0;
  std::uint64_t resamples = 0;
  for (const BatchSum& acc : batch_sums) {
    total += acc.sum;
    total_sq += acc.sum_sq;
    resamples += acc.resamples;
  }
  const double rate =
      static_cast<double>(resamples) / static_cast<double>(N);
  if (rate > 1e-3) {
    throw mc_abort_error(
        "geometry.mc_estimate: degeneracy resample rate " +
            std::to_string(rate) + " exceeds 0.1%",
        rate);
  }
  const double mean = total / static_cast<double>(N);
  double variance =
      (total_sq - static_cast<double>(N) * mean * mean) /
      (static_cast<double>(N) - 1.0);
  if (variance < 0.0) variance = 0.0;
  MCEstimate estimate;
  estimate.mean = mean;
  estimate.standard_error = std::sqrt(variance / static_cast<double>(N));
  estimate.resample_count = resamples;
  estimate.sample_count = N;
  return estimate;
}

}  // namespace betapoly

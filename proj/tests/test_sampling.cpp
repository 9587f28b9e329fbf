#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "betapoly/sampling.hpp"
#include "betapoly/specfun.hpp"
#include "stat_util.hpp"

using namespace betapoly;

namespace {

struct MeanSe {
  double mean;
  double se;
};

template <typename Fn>
MeanSe sample_mean(std::size_t n, Fn&& draw) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1.0);
  return {mean, std::sqrt(std::max(var, 0.0) / n)};
}

}  // namespace

TEST_CASE("equal seeds reproduce equal streams", "[sampling]") {
  RandomSource a(123, 5), b(123, 5);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.uniform() == b.uniform());
  }
  RandomSource c(123, 5), d(123, 6), e(124, 5);
  bool stream_differs = false, seed_differs = false;
  for (int i = 0; i < 50; ++i) {
    const double x = c.uniform();
    if (x != d.uniform()) stream_differs = true;
    if (x != e.uniform()) seed_differs = true;
  }
  CHECK(stream_differs);
  CHECK(seed_differs);

  RandomSource g1(9, 0), g2(9, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK(g1.normal() == g2.normal());
    CHECK(g1.gamma(0.35) == g2.gamma(0.35));
  }
}

TEST_CASE("batches are byte-identical for equal (seed, stream)", "[sampling]") {
  const PolytopeSpec spec(3, BetaVector({0.0, 0.5, -0.5, 2.0}));
  RandomSource r1(2024, 17), r2(2024, 17);
  const SampleBatch b1 = sample_batch(spec, 50, r1);
  const SampleBatch b2 = sample_batch(spec, 50, r2);
  REQUIRE(b1.coords.size() == b2.coords.size());
  CHECK(std::memcmp(b1.coords.data(), b2.coords.data(),
                    b1.coords.size() * sizeof(double)) == 0);
  CHECK(b1.draw_count() == 50);
  CHECK(b1.seed == 2024);
  CHECK(b1.stream == 17);
  for (double c : b1.coords) CHECK(std::fabs(c) <= 1.0);
  // every sampled point stays in the closed unit ball
  for (std::size_t draw = 0; draw < b1.draw_count(); ++draw) {
    for (std::size_t i = 0; i < spec.point_count(); ++i) {
      const double* p = b1.point(draw, i);
      double norm_sq = 0.0;
      for (int c = 0; c < 3; ++c) norm_sq += p[c] * p[c];
      CHECK(norm_sq <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("gamma and beta variates have the right first moments",
          "[sampling]") {
  RandomSource rng(7, 0);
  {
    const MeanSe g =
        sample_mean(200000, [&] { return rng.gamma(2.5); });
    CHECK(std::fabs(g.mean - 2.5) < 4.0 * g.se);
  }
  {
    const MeanSe g = sample_mean(200000, [&] { return rng.gamma(0.4); });
    CHECK(std::fabs(g.mean - 0.4) < 4.0 * g.se);
  }
  {
    const MeanSe b =
        sample_mean(200000, [&] { return rng.beta(1.5, 0.5); });
    CHECK(std::fabs(b.mean - 0.75) < 4.0 * b.se);
  }
  CHECK_THROWS_AS(rng.gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(rng.gamma(-1.0), std::domain_error);
}

TEST_CASE("squared radius has mean (d/2)/(d/2+beta+1)", "[sampling]") {
  RandomSource rng(42, 1);
  {
    const MeanSe m = sample_mean(1000000, [&] {
      const auto x = sample_beta_point(2, BetaParam(0.0), rng);
      return x[0] * x[0] + x[1] * x[1];
    });
    CHECK(std::fabs(m.mean - 0.5) < 3.0 * m.se);
  }
  {
    const MeanSe m = sample_mean(1000000, [&] {
      const auto x = sample_beta_point(3, BetaParam(1.0), rng);
      return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    });
    CHECK(std::fabs(m.mean - 3.0 / 7.0) < 3.0 * m.se);
  }
  {
    const MeanSe m = sample_mean(200000, [&] {
      return sample_beta_point(2, BetaParam(-0.5), rng).back() <= 0.0 ? 1.0
                                                                      : 0.0;
    });
    CHECK(std::fabs(m.mean - 0.5) < 3.0 * m.se);
  }
}

TEST_CASE("sphere points are unit length and centered", "[sampling]") {
  RandomSource rng(5, 2);
  for (int d : {1, 2, 3, 5}) {
    for (int i = 0; i < 1000; ++i) {
      const auto x = sample_sphere_point(d, rng);
      double norm_sq = 0.0;
      for (double c : x) norm_sq += c * c;
      CHECK(std::fabs(std::sqrt(norm_sq) - 1.0) < 1e-12);
    }
  }
  {
    std::vector<double> mean(3, 0.0);
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = sample_sphere_point(3, rng);
      for (int c = 0; c < 3; ++c) mean[c] += x[c];
    }
    // per-component variance of a uniform direction in R^3 is 1/3
    const double se = std::sqrt(1.0 / 3.0 / n);
    for (int c = 0; c < 3; ++c) {
      CHECK(std::fabs(mean[c] / n) < 3.0 * se);
    }
  }
  {
    const MeanSe plus = sample_mean(
        100000, [&] { return sample_sphere_point(1, rng)[0] > 0 ? 1.0 : 0.0; });
    CHECK(std::fabs(plus.mean - 0.5) < 3.0 * plus.se);
  }
  CHECK_THROWS_AS(sample_sphere_point(0, rng), std::domain_error);
}

TEST_CASE("coordinate projection", "[sampling]") {
  const std::vector<double> x{0.3, 0.4, 0.0};
  CHECK(project_first_k(x, 3) == x);
  CHECK(project_first_k(x, 2) == std::vector<double>{0.3, 0.4});
  CHECK_THROWS_AS(project_first_k(x, 0), std::domain_error);
  CHECK_THROWS_AS(project_first_k(x, 4), std::domain_error);
}

TEST_CASE("projected squared norm follows the marginal beta law",
          "[sampling]") {
  // Projecting f_{d,beta} onto k coordinates gives f_{k,beta+(d-k)/2},
  // whose squared radius is Beta(k/2, beta+(d-k)/2+1).
  const struct {
    int d;
    int k;
    double beta;
  } cases[] = {{3, 1, 0.0}, {3, 2, 0.5}, {4, 2, -0.5}};
  int stream = 0;
  for (const auto& c : cases) {
    RandomSource rng(1337, ++stream);
    std::vector<double> data;
    data.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      const auto x = sample_beta_point(c.d, BetaParam(c.beta), rng);
      const auto p = project_first_k(x, c.k);
      double norm_sq = 0.0;
      for (double v : p) norm_sq += v * v;
      data.push_back(norm_sq);
    }
    const double shape1 = 0.5 * c.k;
    const double shape2 = c.beta + 0.5 * (c.d - c.k) + 1.0;
    const double p_value = testutil::ks_p_value(std::move(data), [&](double t) {
      if (t <= 0.0) return 0.0;
      if (t >= 1.0) return 1.0;
      return reg_inc_beta(shape1, shape2, t);
    });
    INFO("d=" << c.d << " k=" << c.k << " beta=" << c.beta
              << " p=" << p_value);
    CHECK(p_value > 1e-3);
  }
}

TEST_CASE("upper half-space probabilities match 1 - F", "[sampling]") {
  {
    RandomSource rng(3, 0);
    CHECK(empirical_halfspace_prob(2, BetaParam(0.5), -1.0, 1000, rng) == 1.0);
  }
  {
    RandomSource rng(3, 1);
    const double p = empirical_halfspace_prob(3, BetaParam(0.0), 0.0, 1000000, rng);
    CHECK(std::fabs(p - 0.5) < 3.0 * std::sqrt(0.25 / 1000000.0));
  }
  {
    // 1 - F_1(1/2) = 5/32 for the beta=0 ball in R^3
    RandomSource rng(3, 2);
    const double want = 5.0 / 32.0;
    const double p = empirical_halfspace_prob(3, BetaParam(0.0), 0.5, 1000000, rng);
    CHECK(std::fabs(p - want) < 3.0 * std::sqrt(want * (1.0 - want) / 1000000.0));
    CHECK(std::fabs((1.0 - beta_cdf(BetaParam(1.0), 0.5)) - want) < 1e-14);
  }
  // grid check against the shifted one-dimensional CDF
  const struct {
    int d;
    double beta;
  } laws[] = {{2, 0.0}, {3, 1.0}, {2, -0.5}};
  int stream = 10;
  for (const auto& law : laws) {
    RandomSource rng(99, ++stream);
    const BetaParam shifted(law.beta + 0.5 * (law.d - 1));
    for (int i = 0; i < 9; ++i) {
      const double h = -0.8 + 0.2 * i;
      const std::size_t N = 100000;
      const double p =
          empirical_halfspace_prob(law.d, BetaParam(law.beta), h, N, rng);
      const double want = 1.0 - beta_cdf(shifted, h);
      const double se = std::sqrt(want * (1.0 - want) / N);
      INFO("d=" << law.d << " beta=" << law.beta << " h=" << h);
      CHECK(std::fabs(p - want) <= 4.0 * se);
    }
  }
}

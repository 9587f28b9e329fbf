// Acceptance battery: ten checks, one [PASS]/[FAIL] line each, nonzero
// exit if anything fails. Each check states its measured error and elapsed
// time so a failing line is diagnosable on its own.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "betapoly/betapoly.hpp"
#include "stat_util.hpp"

using namespace betapoly;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, const char* name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", index,
              name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <typename Fn>
void guarded(int index, const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(index, name, false, std::string("exception: ") + e.what());
  }
}

std::string run_cli_capture(const std::string& args, int& status) {
  const std::string cmd =
      std::string(BETAPOLY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return "";
  }
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int rc = pclose(pipe);
  status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

void criterion_1() {
  const Timer timer;
  const double value = expected_volume(PolytopeSpec(1, BetaVector({0, 0})));
  const double elapsed = timer.seconds();
  const double err = rel_err(value, 2.0 / 3.0);
  std::ostringstream detail;
  detail << "rel err " << err << ", " << elapsed << " s";
  report(1, "segment expected length is 2/3", err <= 1e-12 && elapsed < 0.1,
         detail.str());
}

void criterion_2() {
  const Timer timer;
  const PolytopeSpec spec(2, BetaVector({0, 0, 0}));
  const double volume = expected_volume(spec);
  const double moment = miles_moment(spec.betas, 1.0);
  const double err = rel_err(volume, moment);
  const MCEstimate mc = mc_estimate(spec, MCFunctional::volume(), 1000000,
                                    RandomSource(20260814, 0));
  const double z_volume = (mc.mean - volume) / mc.standard_error;
  const double z_moment = (mc.mean - moment) / mc.standard_error;
  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "rel err " << err << ", z " << z_volume << ", " << elapsed
         << " s";
  report(2, "uniform disk triangle: sum formula = moment formula = MC",
         err <= 1e-10 && std::fabs(z_volume) < 4.0 &&
             std::fabs(z_moment) < 4.0 && elapsed < 30.0,
         detail.str());
}

void criterion_3() {
  const Timer timer;
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int n = d + 1; n <= d + 5; ++n) {
      for (double beta : {-0.9, -0.5, 0.0, 1.0, 3.0}) {
        const double general = expected_volume(
            PolytopeSpec(d, BetaVector(std::vector<double>(n, beta))));
        const double equal = ktt_equal_beta(d, n, BetaParam(beta));
        worst = std::max(worst, rel_err(general, equal));
      }
    }
  }
  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "worst rel diff " << worst << " over 75 cases, " << elapsed
         << " s";
  report(3, "general sum matches the equal-parameter formula",
         worst <= 1e-10 && elapsed < 10.0, detail.str());
}

void criterion_4() {
  const Timer timer;
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> beta_draw(-0.4, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const int n = d + 1 + static_cast<int>(gen() % (7 - d));
    std::vector<double> betas(n);
    for (double& b : betas) b = beta_draw(gen);
    const KubotaCheck check =
        kubota_cross_check(PolytopeSpec(d, BetaVector(betas)));
    worst = std::max(worst, rel_err(check.volume_route, check.wieacker_route));
  }
  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "worst rel diff " << worst << " over 20 instances, " << elapsed
         << " s";
  report(4, "volume agrees with the lifted facet functional (projection)",
         worst <= 1e-8 && elapsed < 60.0, detail.str());
}

void criterion_5() {
  const Timer timer;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> beta_draw(-0.9, 3.0);
  double worst_simplex = 0.0;
  for (int d = 1; d <= 4; ++d) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> betas(d + 1);
      for (double& b : betas) b = beta_draw(gen);
      const double count = expected_wieacker(
          PolytopeSpec(d, BetaVector(betas)), WieackerParams(0.0, 0.0));
      worst_simplex = std::max(worst_simplex, rel_err(count, d + 1.0));
    }
  }
  double worst_interval = 0.0;
  for (int n = 1; n <= 8; ++n) {
    std::vector<double> betas(n);
    for (double& b : betas) b = beta_draw(gen);
    for (double b_exp : {0.0, 0.7, 2.0}) {
      const double count = expected_wieacker(
          PolytopeSpec(1, BetaVector(betas)), WieackerParams(0.0, b_exp));
      worst_interval = std::max(worst_interval, rel_err(count, 2.0));
    }
  }
  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "simplex err " << worst_simplex << ", interval err "
         << worst_interval << ", " << elapsed << " s";
  report(5, "facet-count laws (d+1 for simplices, 2 for intervals)",
         worst_simplex <= 1e-10 && worst_interval <= 1e-10, detail.str());
}

void criterion_6() {
  const struct {
    int n;
    double a;
    double b;
  } cases[] = {{4, 0, 1}, {4, 1, 1}, {4, 2, 0},
               {5, 0, 1}, {5, 1, 1}, {5, 2, 0}};
  bool all_ok = true;
  double worst_z = 0.0, worst_time = 0.0;
  int stream = 0;
  for (const auto& c : cases) {
    const Timer timer;
    std::vector<double> betas{0.0, 0.5, -0.25, 1.5};
    if (c.n == 5) betas.push_back(3.0);
    const PolytopeSpec spec(2, BetaVector(betas));
    const double closed =
        expected_wieacker(spec, WieackerParams(c.a, c.b));
    const MCEstimate mc =
        mc_estimate(spec, MCFunctional::wieacker(c.a, c.b), 100000,
                    RandomSource(606, 100 * ++stream));
    const double z = (mc.mean - closed) / mc.standard_error;
    const double elapsed = timer.seconds();
    worst_z = std::max(worst_z, std::fabs(z));
    worst_time = std::max(worst_time, elapsed);
    if (!(std::fabs(z) < 4.0 && elapsed < 60.0)) all_ok = false;
  }
  std::ostringstream detail;
  detail << "worst |z| " << worst_z << " over 6 cases, slowest "
         << worst_time << " s";
  report(6, "facet functional matches Monte Carlo (d=2, three exponent pairs)",
         all_ok, detail.str());
}

void criterion_7() {
  const Timer timer;
  const struct {
    int d;
    int k;
    double beta;
  } cases[] = {{3, 1, 0.0}, {3, 2, 0.5}, {4, 2, -0.5}};
  bool all_ok = true;
  double worst_p = 1.0;
  int stream = 0;
  for (const auto& c : cases) {
    RandomSource rng(7077, ++stream);
    std::vector<double> data;
    data.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      const std::vector<double> x =
          sample_beta_point(c.d, BetaParam(c.beta), rng);
      double norm_sq = 0.0;
      for (int j = 0; j < c.k; ++j) norm_sq += x[j] * x[j];
      data.push_back(norm_sq);
    }
    const double shape1 = 0.5 * c.k;
    const double shape2 = c.beta + 0.5 * (c.d - c.k) + 1.0;
    const double p =
        testutil::ks_p_value(std::move(data), [&](double t) {
          if (t <= 0.0) return 0.0;
          if (t >= 1.0) return 1.0;
          return reg_inc_beta(shape1, shape2, t);
        });
    worst_p = std::min(worst_p, p);
    if (!(p > 1e-3)) all_ok = false;
  }
  std::ostringstream detail;
  detail << "smallest KS p-value " << worst_p << ", " << timer.seconds()
         << " s";
  report(7, "projected points follow the marginal beta law", all_ok,
         detail.str());
}

void criterion_8() {
  const Timer timer;
  const struct {
    int d;
    double beta;
  } laws[] = {{2, 0.0}, {3, 1.0}, {2, -0.5}};
  bool all_ok = true;
  double worst_pull = 0.0;
  int stream = 0;
  for (const auto& law : laws) {
    const BetaParam shifted(law.beta + 0.5 * (law.d - 1));
    RandomSource rng(8088, ++stream);
    for (int i = 0; i < 9; ++i) {
      const double h = -0.8 + 0.2 * i;
      const std::size_t N = 100000;
      const double empirical =
          empirical_halfspace_prob(law.d, BetaParam(law.beta), h, N, rng);
      const double want = 1.0 - beta_cdf(shifted, h);
      const double se = std::sqrt(want * (1.0 - want) / N);
      worst_pull = std::max(worst_pull, std::fabs(empirical - want) / se);
      if (!(std::fabs(empirical - want) <= 4.0 * se)) all_ok = false;
    }
  }
  // analytic anchor: 1 - F_1(1/2) = 5/32 for beta = 0 in R^3
  const double exact_gap =
      std::fabs((1.0 - beta_cdf(BetaParam(1.0), 0.5)) - 5.0 / 32.0);
  RandomSource rng(8088, 50);
  const double empirical =
      empirical_halfspace_prob(3, BetaParam(0.0), 0.5, 100000, rng);
  const double se = std::sqrt((5.0 / 32.0) * (27.0 / 32.0) / 100000.0);
  const bool anchor_ok =
      exact_gap < 1e-14 && std::fabs(empirical - 5.0 / 32.0) <= 4.0 * se;
  std::ostringstream detail;
  detail << "worst |pull| " << worst_pull << " over 27 grid points, "
         << timer.seconds() << " s";
  report(8, "half-space probabilities match 1 - F (incl. 5/32 anchor)",
         all_ok && anchor_ok, detail.str());
}

void criterion_9() {
  const Timer timer;
  // Independent route: integrate f(x1) f(x2) |x1 - x2| over the chord
  // {y = h} of the unit disk with a tensor Gauss rule on the triangle
  // s < t (doubled), with f the uniform disk density 1/pi.
  const QuadratureRule rule = jacobi_rule(0.0, 48);
  double worst = 0.0;
  for (double h : {0.0, 0.3, 0.7}) {
    const double w = std::sqrt(1.0 - h * h);
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = w * rule.nodes[i];
      const double span = t + w;  // inner range s in [-w, t]
      double inner = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double s = -w + span * 0.5 * (rule.nodes[j] + 1.0);
        inner += rule.weights[j] * (t - s);
      }
      integral += rule.weights[i] * w * inner * span * 0.5;
    }
    const double direct = 2.0 * integral / (kPi * kPi);
    const double closed = lemma_section_value(2, BetaVector({0, 0}), 1.0, h);
    worst = std::max(worst, rel_err(closed, direct));
  }
  std::ostringstream detail;
  detail << "worst rel err " << worst << ", " << timer.seconds() << " s";
  report(9, "section identity matches direct chord integration",
         worst <= 1e-6, detail.str());
}

void criterion_10() {
  const Timer timer;
  const std::string args =
      "verify --d 2 --betas 0,0,0,0 --samples 100000 --seed 42";
  int s1 = 0, s2 = 0, s3 = 0;
  const std::string first = run_cli_capture(args + " --threads 1", s1);
  const std::string second = run_cli_capture(args + " --threads 1", s2);
  const std::string threaded = run_cli_capture(args + " --threads 8", s3);
  const bool ok = s1 == 0 && s2 == 0 && s3 == 0 && !first.empty() &&
                  first == second && first == threaded;
  std::ostringstream detail;
  detail << "report " << first.size() << " bytes, runs identical: "
         << (first == second ? "yes" : "NO") << ", threads 1 vs 8: "
         << (first == threaded ? "yes" : "NO") << ", " << timer.seconds()
         << " s";
  report(10, "verify reports are byte-identical across runs and threads", ok,
         detail.str());
}

}  // namespace

int main() {
  guarded(1, "segment expected length is 2/3", criterion_1);
  guarded(2, "uniform disk triangle: sum formula = moment formula = MC",
          criterion_2);
  guarded(3, "general sum matches the equal-parameter formula", criterion_3);
  guarded(4, "volume agrees with the lifted facet functional (projection)",
          criterion_4);
  guarded(5, "facet-count laws (d+1 for simplices, 2 for intervals)",
          criterion_5);
  guarded(6, "facet functional matches Monte Carlo (d=2, three exponent pairs)",
          criterion_6);
  guarded(7, "projected points follow the marginal beta law", criterion_7);
  guarded(8, "half-space probabilities match 1 - F (incl. 5/32 anchor)",
          criterion_8);
  guarded(9, "section identity matches direct chord integration", criterion_9);
  guarded(10, "verify reports are byte-identical across runs and threads",
          criterion_10);

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}

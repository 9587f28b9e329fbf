#pragma once

// Command dispatch and report serialization for the betapoly front end.
// Flag parsing lives in the tool binary; everything here is testable
// in-process: beta-list parsing (decimals, fractions, equal:β:n), the
// closed-form / Monte Carlo dispatch, and the JSON/CSV renderers.
//
// Reports are reproducible artifacts: every number is printed with 17
// significant digits (exact double round trip), and nothing that varies
// between runs — wall time above all — goes into the serialized text.
// Timing is returned separately for the caller to log on stderr.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "betapoly/closedform.hpp"
#include "betapoly/geometry.hpp"
#include "betapoly/quadrature.hpp"
#include "betapoly/sampling.hpp"
#include "betapoly/specfun.hpp"

namespace betapoly {

struct RunConfig {
  enum class Command { volume, wieacker, moment, verify, sweep, selftest };
  enum class Format { json, csv };

  Command command = Command::volume;
  int dimension = 1;
  std::vector<double> betas;
  double a = 0.0;
  double b = 0.0;
  double k = 1.0;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double rel_tol = 1e-11;
  std::uint64_t group_budget = 10'000'000;
  int threads = 1;
  Format format = Format::json;

  // verify / sweep: which closed form is being evaluated
  std::string functional = "volume";  // volume | wieacker | moment

  // sweep grid: parameter in {n, beta, a, b}, inclusive endpoints
  std::string sweep_param;
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  int sweep_steps = 1;
  std::size_t sweep_beta_index = 0;
  bool sweep_with_mc = false;
};

struct EstimateReport {
  std::string command;
  double closed_form = 0.0;
  double quadrature_error = 0.0;
  bool has_mc = false;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double z_score = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t term_count = 0;
  std::uint64_t resample_count = 0;
  // Set when a moment order enters gamma functions outside the proven
  // integer range (non-integer b or k): the value is an analytic
  // continuation, flagged so downstream tooling can tell it apart.
  bool extrapolated = false;
  double wall_time = 0.0;  // seconds; never serialized
};

namespace cli_detail {

inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t");
  std::size_t last = s.find_last_not_of(" \t");
  if (first == std::string::npos) return "";
  return s.substr(first, last - first + 1);
}

inline double parse_real_strict(const std::string& token,
                                const std::string& what) {
  const std::string t = trim(token);
  if (t.empty()) {
    throw std::domain_error("cli.parse: empty " + what);
  }
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw std::domain_error("cli.parse: bad " + what + " '" + token + "'");
  }
  return value;
}

}  // namespace cli_detail

// A real number as a decimal or a simple fraction like "-1/2".
inline double parse_real_token(const std::string& token) {
  const std::size_t slash = token.find('/');
  if (slash == std::string::npos) {
    return cli_detail::parse_real_strict(token, "number");
  }
  const double num =
      cli_detail::parse_real_strict(token.substr(0, slash), "numerator");
  const double den =
      cli_detail::parse_real_strict(token.substr(slash + 1), "denominator");
  if (den == 0.0) {
    throw std::domain_error("cli.parse: zero denominator in '" + token + "'");
  }
  return num / den;
}

// "0,1/2,-0.9" as an explicit list, or "equal:beta:n" for n equal entries.
inline std::vector<double> parse_betas(const std::string& text) {
  const std::string t = cli_detail::trim(text);
  if (t.rfind("equal:", 0) == 0) {
    const std::string rest = t.substr(6);
    const std::size_t colon = rest.find(':');
    if (colon == std::string::npos) {
      throw std::domain_error(
          "cli.parse: equal form is equal:beta:n, got '" + text + "'");
    }
    const double beta = parse_real_token(rest.substr(0, colon));
    const std::string count_str = cli_detail::trim(rest.substr(colon + 1));
    char* end = nullptr;
    const long count = std::strtol(count_str.c_str(), &end, 10);
    if (end != count_str.c_str() + count_str.size() || count < 1) {
      throw std::domain_error("cli.parse: bad point count in '" + text + "'");
    }
    return std::vector<double>(static_cast<std::size_t>(count), beta);
  }
  std::vector<double> values;
  std::stringstream stream(t);
  std::string token;
  while (std::getline(stream, token, ',')) {
    values.push_back(parse_real_token(token));
  }
  if (values.empty()) {
    throw std::domain_error("cli.parse: empty beta list");
  }
  return values;
}

inline std::string render_report(const EstimateReport& report,
                                 RunConfig::Format format) {
  using cli_detail::format_real;
  std::ostringstream out;
  if (format == RunConfig::Format::json) {
    out << "{\"command\":\"" << report.command << "\""
        << ",\"closed_form\":" << format_real(report.closed_form)
        << ",\"quadrature_error\":" << format_real(report.quadrature_error);
    if (report.has_mc) {
      out << ",\"mc_mean\":" << format_real(report.mc_mean)
          << ",\"mc_se\":" << format_real(report.mc_se)
          << ",\"z_score\":" << format_real(report.z_score);
    }
    out << ",\"seed\":" << report.seed
        << ",\"term_count\":" << report.term_count
        << ",\"resample_count\":" << report.resample_count
        << ",\"extrapolated\":" << (report.extrapolated ? "true" : "false")
        << "}";
  } else {
    out << "command,closed_form,quadrature_error";
    if (report.has_mc) out << ",mc_mean,mc_se,z_score";
    out << ",seed,term_count,resample_count,extrapolated\n";
    out << report.command << "," << format_real(report.closed_form) << ","
        << format_real(report.quadrature_error);
    if (report.has_mc) {
      out << "," << format_real(report.mc_mean) << ","
          << format_real(report.mc_se) << "," << format_real(report.z_score);
    }
    out << "," << report.seed << "," << report.term_count << ","
        << report.resample_count << ","
        << (report.extrapolated ? "true" : "false");
  }
  out << "\n";
  return out.str();
}

namespace cli_detail {

struct ClosedEval {
  double value = 0.0;
  double quadrature_error = 0.0;
  std::uint64_t term_count = 0;
};

inline ClosedEval evaluate_closed(const RunConfig& config) {
  EvalOptions options;
  options.rel_tol = config.rel_tol;
  options.group_budget = config.group_budget;
  options.threads = config.threads;
  ClosedEval eval;
  if (config.functional == "volume") {
    const PolytopeSpec spec(config.dimension, BetaVector(config.betas));
    const ClosedFormResult r = expected_volume_detailed(spec, options);
    eval = {r.value, r.quadrature_error, r.term_count};
  } else if (config.functional == "wieacker") {
    const PolytopeSpec spec(config.dimension, BetaVector(config.betas));
    const WieackerParams params(config.a, config.b);
    const ClosedFormResult r = expected_wieacker_detailed(spec, params, options);
    eval = {r.value, r.quadrature_error, r.term_count};
  } else if (config.functional == "moment") {
    eval.value = miles_moment(BetaVector(config.betas), config.k);
    eval.term_count = 1;
  } else {
    throw std::domain_error("cli.run: unknown functional '" +
                            config.functional + "'");
  }
  return eval;
}

inline MCFunctional mc_functional_for(const RunConfig& config) {
  if (config.functional == "volume") return MCFunctional::volume();
  if (config.functional == "wieacker") {
    return MCFunctional::wieacker(config.a, config.b);
  }
  return MCFunctional::simplex_moment(config.k);
}

// z with a guard for functionals that are almost surely constant (facet
// counts): zero spread and agreement means z = 0 rather than 0/0.
inline double z_score_of(double mc_mean, double mc_se, double closed) {
  const double diff = mc_mean - closed;
  if (mc_se > 0.0) return diff / mc_se;
  const double scale = std::max(1.0, std::fabs(closed));
  return std::fabs(diff) <= 1e-9 * scale ? 0.0
                                         : std::copysign(1e300, diff);
}

inline EstimateReport run_single(const RunConfig& config,
                                 const std::string& name, bool with_mc) {
  EstimateReport report;
  report.command = name;
  report.seed = config.seed;
  const ClosedEval eval = evaluate_closed(config);
  report.closed_form = eval.value;
  report.quadrature_error = eval.quadrature_error;
  report.term_count = eval.term_count;
  if (config.functional == "wieacker") {
    report.extrapolated = config.b != std::floor(config.b);
  } else if (config.functional == "moment") {
    report.extrapolated = config.k != std::floor(config.k);
  }
  if (with_mc) {
    if (config.samples < 2) {
      throw std::domain_error("cli.run: verify needs --samples >= 2");
    }
    int mc_dim = config.dimension;
    if (config.functional == "moment") {
      if (config.betas.size() < 2) {
        throw std::domain_error(
            "cli.run: moment verification needs at least 2 points");
      }
      mc_dim = static_cast<int>(config.betas.size()) - 1;
    }
    const PolytopeSpec spec(mc_dim, BetaVector(config.betas));
    const RandomSource rng(config.seed, 0);
    const MCEstimate mc = mc_estimate(spec, mc_functional_for(config),
                                      config.samples, rng, config.threads);
    report.has_mc = true;
    report.mc_mean = mc.mean;
    report.mc_se = mc.standard_error;
    report.z_score = z_score_of(mc.mean, mc.standard_error, eval.value);
    report.resample_count = mc.resample_count;
  }
  return report;
}

inline std::string run_sweep(const RunConfig& config) {
  if (config.sweep_steps < 1) {
    throw std::domain_error("cli.run: sweep needs --steps >= 1");
  }
  const bool is_n = config.sweep_param == "n";
  const bool is_beta = config.sweep_param == "beta";
  const bool is_a = config.sweep_param == "a";
  const bool is_b = config.sweep_param == "b";
  if (!is_n && !is_beta && !is_a && !is_b) {
    throw std::domain_error(
        "cli.run: sweep parameter must be one of n, beta, a, b");
  }
  if ((is_a || is_b) && config.functional != "wieacker") {
    throw std::domain_error(
        "cli.run: sweeping a or b requires the wieacker functional");
  }
  if (is_beta && config.sweep_beta_index >= config.betas.size()) {
    throw std::domain_error("cli.run: sweep beta index out of range");
  }

  std::ostringstream out;
  using cli_detail::format_real;
  out << "param,value,closed_form,quadrature_error";
  if (config.sweep_with_mc) out << ",mc_mean,mc_se,z_score";
  out << "\n";

  for (int step = 0; step < config.sweep_steps; ++step) {
    const double t =
        config.sweep_steps == 1
            ? config.sweep_from
            : config.sweep_from + (config.sweep_to - config.sweep_from) *
                                      step / (config.sweep_steps - 1);
    RunConfig point = config;
    double reported_value = t;
    if (is_n) {
      const long n = std::lround(t);
      if (n < 1) throw std::domain_error("cli.run: sweep n must be >= 1");
      if (point.betas.empty()) {
        throw std::domain_error("cli.run: sweep over n needs a base beta");
      }
      point.betas.assign(static_cast<std::size_t>(n), point.betas.front());
      reported_value = static_cast<double>(n);
    } else if (is_beta) {
      point.betas[point.sweep_beta_index] = t;
    } else if (is_a) {
      point.a = t;
    } else {
      point.b = t;
    }
    const EstimateReport row =
        run_single(point, "sweep", config.sweep_with_mc);
    out << config.sweep_param << "," << format_real(reported_value) << ","
        << format_real(row.closed_form) << ","
        << format_real(row.quadrature_error);
    if (config.sweep_with_mc) {
      out << "," << format_real(row.mc_mean) << "," << format_real(row.mc_se)
          << "," << format_real(row.z_score);
    }
    out << "\n";
  }
  return out.str();
}

inline bool close_rel(double x, double y, double tol) {
  return std::fabs(x - y) <= tol * std::max(std::fabs(x), std::fabs(y));
}

inline std::string run_selftest(const RunConfig& config, bool& failed) {
  std::ostringstream out;
  failed = false;
  auto check = [&](const std::string& name, bool ok) {
    out << "selftest " << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) failed = true;
  };

  check("segment expected length 2/3",
        close_rel(expected_volume(PolytopeSpec(1, BetaVector({0.0, 0.0}))),
                  2.0 / 3.0, 1e-12));
  check("uniform triangle in the disk matches the simplex moment",
        close_rel(expected_volume(PolytopeSpec(2, BetaVector({0.0, 0.0, 0.0}))),
                  miles_moment(BetaVector({0.0, 0.0, 0.0}), 1.0), 1e-12));
  check("equal-parameter volume identity (d=2, n=5, beta=1/2)",
        close_rel(expected_volume(
                      PolytopeSpec(2, BetaVector(std::vector<double>(5, 0.5)))),
                  ktt_equal_beta(2, 5, BetaParam(0.5)), 1e-11));
  {
    const KubotaCheck kub =
        kubota_cross_check(PolytopeSpec(1, BetaVector({0.25, 0.5, 1.0})));
    check("projection identity (d=1, three mixed betas)",
          close_rel(kub.volume_route, kub.wieacker_route, 1e-9));
  }
  check("simplex facet count d=3",
        close_rel(expected_wieacker(
                      PolytopeSpec(3, BetaVector({0.0, 0.5, 1.0, 2.0})),
                      WieackerParams(0.0, 0.0)),
                  4.0, 1e-11));
  check("interval endpoint count is 2 for any volume exponent",
        close_rel(expected_wieacker(
                      PolytopeSpec(1, BetaVector({0.0, 0.5, 1.0, 1.5})),
                      WieackerParams(0.0, 3.0)),
                  2.0, 1e-11) &&
            close_rel(expected_wieacker(
                          PolytopeSpec(1, BetaVector({0.0, 0.5, 1.0, 1.5})),
                          WieackerParams(0.0, 0.0)),
                      2.0, 1e-11));
  check("quadrature integrates (1-h^2) exactly",
        close_rel(integrate_weighted(1.0, [](double) { return 1.0; }).value,
                  4.0 / 3.0, 1e-14));
  check("half-space cdf symmetry",
        close_rel(beta_cdf(BetaParam(0.7), 0.3) +
                      beta_cdf(BetaParam(0.7), -0.3),
                  1.0, 1e-13));
  {
    RandomSource rng(config.seed, 7);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 4; ++i) {
      pts.push_back(sample_beta_point(3, BetaParam(0.5), rng));
    }
    check("cone volume equals simplex volume on a tetrahedron",
          close_rel(polytope_volume(pts), simplex_volume(pts), 1e-12));
  }
  {
    const RandomSource rng(config.seed, 0);
    const MCEstimate mc =
        mc_estimate(PolytopeSpec(1, BetaVector({0.0, 0.0})),
                    MCFunctional::volume(), 20000, rng, config.threads);
    const double z = (mc.mean - 2.0 / 3.0) / mc.standard_error;
    check("small Monte Carlo run agrees with the segment value",
          std::fabs(z) < 5.0);
  }
  out << (failed ? "selftest FAILED\n" : "selftest passed\n");
  return out.str();
}

}  // namespace cli_detail

struct RunOutput {
  std::string text;      // serialized report / CSV / selftest log
  int exit_code = 0;     // 0 ok, 3 selftest failure (errors throw)
  double wall_time = 0;  // seconds, for the caller's stderr log
};

inline RunOutput run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunOutput output;
  switch (config.command) {
    case RunConfig::Command::volume: {
      RunConfig c = config;
      c.functional = "volume";
      output.text =
          render_report(cli_detail::run_single(c, "volume", false),
                        config.format);
      break;
    }
    case RunConfig::Command::wieacker: {
      RunConfig c = config;
      c.functional = "wieacker";
      output.text =
          render_report(cli_detail::run_single(c, "wieacker", false),
                        config.format);
      break;
    }
    case RunConfig::Command::moment: {
      RunConfig c = config;
      c.functional = "moment";
      output.text =
          render_report(cli_detail::run_single(c, "moment", false),
                        config.format);
      break;
    }
    case RunConfig::Command::verify:
      output.text = render_report(
          cli_detail::run_single(config, "verify", true), config.format);
      break;
    case RunConfig::Command::sweep:
      output.text = cli_detail::run_sweep(config);
      break;
    case RunConfig::Command::selftest: {
      bool failed = false;
      output.text = cli_detail::run_selftest(config, failed);
      output.exit_code = failed ? 3 : 0;
      break;
    }
  }
  output.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return output;
}

}  // namespace betapoly

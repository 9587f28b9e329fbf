// betapoly command-line front end.
//
// Closed-form expectations for beta polytopes (hull volume, facet
// functional T_{a,b}, simplex moments), Monte Carlo verification, and
// parameter sweeps. Reports go to stdout; timing goes to stderr so that
// repeated runs with the same seed produce byte-identical reports.
//
// Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 selftest
// failure.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "betapoly/betapoly.hpp"

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BETAPOLY_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return value;
    std::fprintf(stderr, "betapoly: ignoring malformed BETAPOLY_SEED '%s'\n",
                 env);
  }
  return 0;
}

void add_common_flags(CLI::App* cmd, betapoly::RunConfig& config,
                      std::string& betas_text, bool& seed_given) {
  cmd->add_option("--d", config.dimension, "ambient dimension");
  cmd->add_option("--betas", betas_text,
                  "beta list: '0,1/2,-0.9' or 'equal:beta:n'");
  cmd->add_option("--rel-tol", config.rel_tol, "quadrature relative tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget", config.group_budget,
                  "cap on distinct subset groups");
  cmd->add_option("--threads", config.threads, "worker thread cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<std::uint64_t>(
         "--seed",
         [&config, &seed_given](const std::uint64_t& s) {
           config.seed = s;
           seed_given = true;
         },
         "RNG seed (default: BETAPOLY_SEED or 0)");
  cmd->add_option_function<std::string>(
         "--format",
         [&config](const std::string& f) {
           if (f == "json") {
             config.format = betapoly::RunConfig::Format::json;
           } else if (f == "csv") {
             config.format = betapoly::RunConfig::Format::csv;
           } else {
             throw CLI::ValidationError("--format must be json or csv");
           }
         },
         "output format: json or csv");
}

}  // namespace

int main(int argc, char** argv) {
  betapoly::RunConfig config;
  config.seed = default_seed();
  std::string betas_text;
  bool seed_given = false;

  CLI::App app{"closed-form and Monte Carlo expectations for beta polytopes"};
  app.require_subcommand(1);

  auto* volume = app.add_subcommand("volume", "expected hull volume");
  auto* wieacker =
      app.add_subcommand("wieacker", "expected facet functional T_{a,b}");
  auto* moment = app.add_subcommand("moment", "simplex volume moment");
  auto* verify =
      app.add_subcommand("verify", "closed form vs Monte Carlo z-score");
  auto* sweep = app.add_subcommand("sweep", "closed form over a parameter grid");
  auto* selftest = app.add_subcommand("selftest", "run the built-in checks");

  for (CLI::App* cmd : {volume, wieacker, moment, verify, sweep, selftest}) {
    add_common_flags(cmd, config, betas_text, seed_given);
  }
  for (CLI::App* cmd : {wieacker, verify, sweep}) {
    cmd->add_option("--a", config.a, "distance exponent");
    cmd->add_option("--b", config.b, "facet volume exponent");
  }
  for (CLI::App* cmd : {moment, verify, sweep}) {
    cmd->add_option("--k", config.k, "moment order");
  }
  for (CLI::App* cmd : {verify, sweep}) {
    cmd->add_option("--samples", config.samples, "Monte Carlo sample count");
    cmd->add_option("--functional", config.functional,
                    "closed form to evaluate: volume, wieacker, or moment");
  }
  sweep->add_option("--param", config.sweep_param,
                    "swept parameter: n, beta, a, or b")
      ->required();
  sweep->add_option("--from", config.sweep_from, "grid start")->required();
  sweep->add_option("--to", config.sweep_to, "grid end")->required();
  sweep->add_option("--steps", config.sweep_steps, "grid point count")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--index", config.sweep_beta_index,
                    "which beta entry varies when --param beta");
  sweep->add_flag("--mc", config.sweep_with_mc,
                  "append Monte Carlo columns to each row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0; any parse error is 1
  }

  try {
    if (volume->parsed()) config.command = betapoly::RunConfig::Command::volume;
    if (wieacker->parsed())
      config.command = betapoly::RunConfig::Command::wieacker;
    if (moment->parsed()) config.command = betapoly::RunConfig::Command::moment;
    if (verify->parsed()) config.command = betapoly::RunConfig::Command::verify;
    if (sweep->parsed()) config.command = betapoly::RunConfig::Command::sweep;
    if (selftest->parsed())
      config.command = betapoly::RunConfig::Command::selftest;

    if (config.command != betapoly::RunConfig::Command::selftest) {
      if (betas_text.empty()) {
        std::fprintf(stderr, "betapoly: --betas is required\n");
        return 1;
      }
      config.betas = betapoly::parse_betas(betas_text);
    }

    const betapoly::RunOutput output = betapoly::run(config);
    std::fputs(output.text.c_str(), stdout);
    std::fprintf(stderr, "wall_time_seconds %.6f\n", output.wall_time);
    return output.exit_code;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "betapoly: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "betapoly: %s\n", e.what());
    return 2;
  }
}

// whipchain: run an experiment described by a config file.
//
//   whipchain run <config> [--output-dir DIR] [--workers N] [--seed S] [--quiet]
//
// Exit status: 0 success, 2 configuration error, 3 numeric failure,
// 4 property-suite violations.

#include "whip/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain and whip simulations"};
  app.set_version_flag("--version", whip::library_version());
  app.require_subcommand(1);

  std::string config_path, output_dir;
  int workers = 0;
  long long seed = -1;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Run the experiment in a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--output-dir", output_dir, "Override output_dir");
  run->add_option("--workers", workers, "Override workers")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Run a single seed instead of the configured list")->check(CLI::NonNegativeNumber);
  run->add_flag("--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  whip::ExperimentConfig cfg;
  try {
    cfg = whip::parse_config(config_path);
  } catch (const whip::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  }
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (workers > 0) cfg.workers = workers;
  if (seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed)};

  try {
    const whip::RunManifest m = whip::run_experiment(cfg, {quiet});
    if (!quiet) {
      fmt::print(stderr, "{}: {} tasks, {} violations, {} numeric failures -> {}\n", m.kind, m.tasks.size(),
                 m.violations, m.numeric_failures, cfg.output_dir.string());
    }
    return whip::exit_code(m);
  } catch (const whip::NumericError& e) {
    fmt::print(stderr, "numeric failure: {}\n", e.what());
    return kNumericFailure;
  } catch (const whip::UnknownGenerator& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const whip::DomainError& e) {
    // generator parameters out of range surface here
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}

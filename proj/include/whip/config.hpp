#pragma once

// Experiment configuration files.
//
// Plain `key = value` lines; `#` starts a comment. Keys are dotted
// (`integrator.cfl`); a `[section]` line prefixes the keys that follow it.
// Lists are comma separated. Every key must be known.
//
//   kind                     run | convergence | inequality_suite |
//                            green_certify | blowup_hunt           (required)
//   n                        list of resolutions, each >= 2        (required)
//   seeds                    list of unsigned integers             [0]
//   output_dir               path                                  [out]
//   formats                  subset of csv, jsonl                  [csv]
//   workers                  concurrent sweep members              [1]
//   initial_data.generator   generator name (run, convergence, blowup_hunt;
//                            blowup_hunt defaults to near_loop)
//   initial_data.<param>     generator parameter
//   integrator.scheme        rk4 | heun                            [rk4]
//   integrator.cfl, dt_max, dt_min, project, halt_on_negative_tension,
//   t_end, report_stride, m_max, blowup_curvature_fraction
//                            (blowup_hunt defaults the last one to 0.7)
//   suite.samples            random inputs per (n, r) or per n     [10000 / 1000]
//   suite.r                  weight exponents                      [0.5, 1, 1.5, 2]
//   suite.max_turn           largest link turn in green_certify    [1.2]
//   blowup.window_fraction, blowup.min_points

#include "whip/blowup.hpp"
#include "whip/dynamics.hpp"
#include "whip/initial_data.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace whip {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : "'" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ExperimentKind { run, convergence, inequality_suite, green_certify, blowup_hunt };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::run;
  std::string generator;
  ParamMap params;
  std::vector<int> n;
  IntegratorConfig integrator;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "out";
  bool csv = true;
  bool jsonl = false;
  int workers = 1;
  int suite_samples = 0;
  std::vector<double> suite_r{0.5, 1.0, 1.5, 2.0};
  double suite_max_turn = 1.2;
  BlowupOptions blowup;

  std::filesystem::path source;  // empty when parsed from text
  std::string config_hash;       // SHA-256 of the source bytes, hex
};

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace whip

#pragma once

// Runs a parsed experiment configuration and writes its outputs.
//
// Files in output_dir, by kind:
//   run           run_n<n>_s<seed>.{csv,jsonl}, summary.csv
//   convergence   convergence_n<n>_s<seed>.{csv,jsonl}, convergence.csv
//   inequality_suite   inequality_suite.csv
//   green_certify      green_certify.csv
//   blowup_hunt   blowup_n<n>_s<seed>.{csv,jsonl}, blowup.csv
// and manifest.json, which lists every file in the directory.

#include "whip/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace whip {

struct FileEntry {
  std::string path;  // relative to output_dir
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct TaskStatus {
  std::string label;
  std::string termination;  // Termination name, "completed", or "error: ..."
};

struct RunManifest {
  std::string kind;
  std::string config_path;
  std::string config_hash;
  std::string version;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  bool complete = false;
  std::string error;     // set when incomplete
  std::vector<TaskStatus> tasks;
  long violations = 0;        // property-suite failures
  long numeric_failures = 0;  // NumericError or dt_underflow
  std::vector<FileEntry> files;
};

struct RunOptions {
  bool quiet = true;  // progress lines on stderr otherwise
};

// Writes outputs and manifest.json. If a task throws anything other than a
// NumericError the manifest is still written (marked incomplete) and the
// exception is rethrown.
RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

// 0 ok, 3 numeric failure, 4 property violations (numeric failures win).
int exit_code(const RunManifest& m);

const char* library_version();

}  // namespace whip

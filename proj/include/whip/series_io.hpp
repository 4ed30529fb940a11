#pragma once

// Snapshot series on disk.
//
// CSV columns, in order:
//   t, e0..eM, et0..etM, u0, v0, a, b, c, d1..dM, min_sigma, max_link_speed,
//   max_curvature, constraint_drift, orthogonality_drift, ratio_a, ratio_c,
//   ratio_d, gronwall
// with M the energy order of the snapshots (et = σ-weighted energy).
// JSON lines: one object per snapshot with the same scalars plus n, d and
// the arrays eta, eta_dot (one inner array per point, η_1..η_{n+1}), sigma
// and sigma_dot (index 0..n). Non-finite scalars are written as null.
// Floating-point values survive a write/read cycle exactly.

#include "whip/dynamics.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace whip {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> csv_columns(int m_max);

// Throws std::invalid_argument on an empty trajectory (no file is created),
// IoError on write failure.
void write_csv(const Trajectory& tr, const std::filesystem::path& path);
void write_jsonl(const Trajectory& tr, const std::filesystem::path& path);

// RFC-4180 quoting for one field.
std::string csv_field(const std::string& s);
std::string format_double(double x);  // 17 significant digits

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

struct StoredSnapshot {
  ChainState state;
  Vec sigma;
  Vec sigma_dot;
};
std::vector<StoredSnapshot> read_jsonl(const std::filesystem::path& path);

}  // namespace whip

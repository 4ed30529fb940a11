#include "whip/experiment.hpp"

#include "whip/inequalities.hpp"
#include "whip/series_io.hpp"
#include "whip/spectral.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#ifndef WHIP_VERSION
#define WHIP_VERSION "unknown"
#endif

namespace whip {

const char* library_version() { return WHIP_VERSION; }

namespace {

namespace fs = std::filesystem;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One sweep member. Rows go into the kind's table in task order.
struct TaskResult {
  TaskStatus status;
  bool numeric_failure = false;
  long violations = 0;
  std::vector<std::vector<std::string>> rows;
  std::exception_ptr fatal;
  std::optional<ChainState> final_state;  // convergence
  std::optional<ChainState> initial_state;
};

using TaskFn = std::function<void(TaskResult&)>;

std::vector<TaskResult> run_tasks(const std::vector<std::pair<std::string, TaskFn>>& tasks, int workers, bool quiet) {
  std::vector<TaskResult> out(tasks.size());
  const long count = static_cast<long>(tasks.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    TaskResult& r = out[i];
    r.status.label = tasks[i].first;
    try {
      tasks[i].second(r);
    } catch (const NumericError& e) {
      r.numeric_failure = true;
      r.status.termination = std::string("error: ") + e.what();
    } catch (const std::exception& e) {
      r.status.termination = std::string("error: ") + e.what();
      r.fatal = std::current_exception();
    }
    if (!quiet) {
#pragma omp critical(whip_progress)
      fmt::print(stderr, "[{}] {}\n", r.status.label, r.status.termination);
    }
  }
  return out;
}

std::string num(double x) { return format_double(x); }

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text += (i ? "," : "") + csv_field(cells[i]);
    text += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

void emit(const ExperimentConfig& cfg, const Trajectory& tr, const std::string& stem) {
  if (cfg.csv) write_csv(tr, cfg.output_dir / (stem + ".csv"));
  if (cfg.jsonl) write_jsonl(tr, cfg.output_dir / (stem + ".jsonl"));
}

void note_termination(TaskResult& r, const Trajectory& tr) {
  r.status.termination = to_string(tr.termination);
  if (tr.termination == Termination::dt_underflow) r.numeric_failure = true;
}

std::string stem(const char* prefix, int n, std::uint64_t seed) { return fmt::format("{}_n{}_s{}", prefix, n, seed); }

// ---------------------------------------------------------------------------
// run

std::vector<std::string> run_header() {
  return {"n", "seed", "termination", "steps", "t_final", "snapshots", "u0_rel_drift", "v0_final",
          "max_projection_length", "max_projection_orthogonal"};
}

TaskFn run_task(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  return [&cfg, n, seed](TaskResult& r) {
    const ChainState init = make_initial(cfg.generator, n, cfg.params, seed);
    const Trajectory tr = run(init, cfg.integrator);
    emit(cfg, tr, stem("run", n, seed));
    note_termination(r, tr);
    const EnergyReport& first = tr.snapshots.front().report;
    const EnergyReport& last = tr.snapshots.back().report;
    const double drift = first.u0 > 0.0 ? std::abs(last.u0 - first.u0) / first.u0 : std::abs(last.u0 - first.u0);
    r.rows.push_back({std::to_string(n), std::to_string(seed), r.status.termination, std::to_string(tr.steps),
                      num(tr.snapshots.back().state.time), std::to_string(tr.snapshots.size()), num(drift), num(last.v0),
                      num(tr.max_projection_length), num(tr.max_projection_orthogonal)});
  };
}

// ---------------------------------------------------------------------------
// convergence

// Position of the polyline through η_1..η_{n+1} at arclength s ∈ [0, 1]
// from the free end.
Eigen::VectorXd polyline_at(const Mat& pts, double s) {
  const int n = static_cast<int>(pts.cols()) - 1;
  const double x = std::clamp(s, 0.0, 1.0) * n;
  const int k = std::min(static_cast<int>(x), n - 1);
  const double w = x - k;
  return (1.0 - w) * pts.col(k) + w * pts.col(k + 1);
}

// max over the coarse nodes of the distance between the two polylines.
double polyline_distance(const Mat& coarse, const Mat& fine) {
  const int n = static_cast<int>(coarse.cols()) - 1;
  double worst = 0.0;
  for (int k = 0; k <= n; ++k) worst = std::max(worst, (coarse.col(k) - polyline_at(fine, static_cast<double>(k) / n)).norm());
  return worst;
}

Mat rotate(const Mat& pts, double angle) {
  Eigen::Matrix2d R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return R * pts;
}

std::vector<std::string> convergence_header() {
  return {"n", "seed", "termination", "steps", "t_final", "position_error_vs_next", "velocity_error_vs_next",
          "error_ratio", "rotation_error"};
}

TaskFn convergence_task(const ExperimentConfig& cfg, int n, int n_base, std::uint64_t seed) {
  return [&cfg, n, n_base, seed](TaskResult& r) {
    const ChainState base = make_initial(cfg.generator, n_base, cfg.params, seed);
    const ChainState init = n == n_base ? base : transfer_resolution(base, n);
    const Trajectory tr = run(init, cfg.integrator);
    emit(cfg, tr, stem("convergence", n, seed));
    note_termination(r, tr);
    r.initial_state = init;
    r.final_state = tr.snapshots.back().state;
    r.rows.push_back({std::to_string(n), std::to_string(seed), r.status.termination, std::to_string(tr.steps),
                      num(tr.snapshots.back().state.time)});
  };
}

void finish_convergence(const ExperimentConfig& cfg, const std::vector<int>& ns, std::vector<TaskResult>& results) {
  // results are ordered seed-major, n ascending within a seed
  const std::size_t per_seed = ns.size();
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
    double prev_err = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < per_seed; ++i) {
      TaskResult& cur = results[s * per_seed + i];
      if (cur.rows.empty()) continue;
      auto& row = cur.rows.front();
      std::string pos, vel, ratio, rot;
      if (i + 1 < per_seed && results[s * per_seed + i + 1].final_state && cur.final_state) {
        const ChainState& fine = *results[s * per_seed + i + 1].final_state;
        const double ep = polyline_distance(cur.final_state->eta, fine.eta);
        const double ev = polyline_distance(cur.final_state->eta_dot, fine.eta_dot);
        pos = num(ep);
        vel = num(ev);
        if (std::isfinite(prev_err) && ep > 0.0) ratio = num(prev_err / ep);
        prev_err = ep;
      }
      if (cfg.generator == "rigid_rotation" && cur.final_state) {
        // closed form for this run's own initial state: rigid rotation at its rate
        const AngleState a = eta_to_theta(*cur.initial_state);
        const double omega = a.theta_dot.mean();
        const Mat exact = rotate(cur.initial_state->eta, omega * cur.final_state->time);
        rot = num((cur.final_state->eta - exact).colwise().norm().maxCoeff());
      }
      row.insert(row.end(), {pos, vel, ratio, rot});
    }
  }
}

// ---------------------------------------------------------------------------
// inequality_suite

std::vector<std::string> suite_header() { return {"check", "n", "r", "seed", "samples", "violations", "worst_ratio"}; }

Vec random_sequence(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> shape(0, 3);
  const double scale = std::exp(normal(rng) * 2.0);
  Vec f(n);
  switch (shape(rng)) {
    case 0:  // white noise
      for (int k = 0; k < n; ++k) f(k) = normal(rng);
      break;
    case 1: {  // random walk
      double acc = normal(rng);
      for (int k = 0; k < n; ++k) f(k) = acc += normal(rng);
      break;
    }
    case 2: {  // a few smooth modes
      const double a = normal(rng), b = normal(rng), c = normal(rng);
      for (int k = 0; k < n; ++k) {
        const double s = (k + 1.0) / n;
        f(k) = a + b * std::cos(M_PI * s) + c * std::sin(3 * M_PI * s);
      }
      break;
    }
    default: {  // spike
      f.setZero();
      f(std::uniform_int_distribution<int>(0, n - 1)(rng)) = 1.0;
      break;
    }
  }
  return scale * f;
}

struct Tally {
  long samples = 0;
  long violations = 0;
  double worst = 0.0;

  void add(const InequalityCheck& c) {
    ++samples;
    if (!c.holds()) ++violations;
    if (c.rhs > 0.0) worst = std::max(worst, c.lhs / c.rhs);
    else if (c.lhs > 0.0) worst = std::numeric_limits<double>::infinity();
  }
};

TaskFn suite_task(const ExperimentConfig& cfg, int n, double r, std::size_t r_index, std::uint64_t seed) {
  return [&cfg, n, r, r_index, seed](TaskResult& res) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(n) * 101ULL + r_index);
    std::uniform_int_distribution<int> pick_k(1, n);
    std::uniform_int_distribution<int> pick_j(1, 4);
    std::map<std::string, Tally> t;
    const auto& rs = cfg.suite_r;
    for (int i = 0; i < cfg.suite_samples; ++i) {
      const Vec f = random_sequence(rng, n);
      t["pointwise_weighted_bound"].add(pointwise_weighted_bound(f, r, n));
      t["lower_order_bound"].add(lower_order_bound(f, r, n));
      t["boundary_bound"].add(boundary_bound(f, r, n));
      const double q = rs[static_cast<std::size_t>(i) % rs.size()];
      const int k = pick_k(rng);
      t["weight_ratio_lower"].add(weight_ratio_lower(r, q, k, n));
      t["weight_ratio_upper"].add(weight_ratio_upper(r, q, k, n));
      const int j = pick_j(rng);
      t["weight_shift_lower"].add(weight_shift_lower(r, j, k, n));
      t["weight_shift_upper"].add(weight_shift_upper(r, j, k, n));
      t["product_bound"].add(product_bound(f, random_sequence(rng, n), r, q, n));
    }
    for (const auto& [name, tally] : t) {
      res.violations += tally.violations;
      res.rows.push_back({name, std::to_string(n), num(r), std::to_string(seed), std::to_string(tally.samples),
                          std::to_string(tally.violations), num(tally.worst)});
    }
    res.status.termination = res.violations ? fmt::format("{} violations", res.violations) : "completed";
  };
}

// ---------------------------------------------------------------------------
// green_certify

std::vector<std::string> certify_header() {
  return {"n", "seed", "samples", "diff_bound_fail", "ratio_bound_fail", "min_bound_fail", "admissible",
          "lower_bound_fail", "corner_checked", "corner_fail", "max_abs_diff", "max_ratio_upper", "min_lower_margin",
          "max_tension_rel_diff"};
}

// Random admissible chain in angle space: every link turn below max_turn < π/2
// keeps all α_i = cos(turn) positive. Turn sizes span several decades so
// that both admissible and inadmissible curvature levels are sampled.
ChainState random_admissible_chain(std::mt19937_64& rng, int n, double max_turn) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> normal;
  const double scale = max_turn * std::pow(10.0, -3.0 * (0.5 * (u(rng) + 1.0)));
  Vec th(n), om(n);
  th(0) = M_PI * u(rng);
  for (int k = 1; k < n; ++k) th(k) = th(k - 1) + scale * u(rng);
  for (int k = 0; k < n; ++k) om(k) = normal(rng);
  return chain_from_angles(th, om);
}

TaskFn certify_task(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  return [&cfg, n, seed](TaskResult& res) {
    std::mt19937_64 rng(seed * 7919ULL + static_cast<std::uint64_t>(n));
    long diff_fail = 0, ratio_fail = 0, min_fail = 0, admissible = 0, lower_fail = 0, corner_checked = 0, corner_fail = 0;
    double max_diff = 0.0, max_ratio = 0.0, min_margin = std::numeric_limits<double>::infinity(), max_tension = 0.0;
    for (int i = 0; i < cfg.suite_samples; ++i) {
      const ChainState c = random_admissible_chain(rng, n, cfg.suite_max_turn);
      const GreenMatrix g = green_matrix(c);
      const BoundCertificate cert = certify_bounds(g, c);
      diff_fail += !cert.diff_bound_ok;
      ratio_fail += !cert.ratio_bound_ok;
      min_fail += !cert.min_bound_ok;
      if (cert.upsilon_admissible) {
        ++admissible;
        lower_fail += !cert.lower_bound_ok;
        min_margin = std::min(min_margin, cert.min_ratio_lower / std::exp(-2.0 * cert.upsilon));
      }
      corner_checked += cert.corner_checked;
      corner_fail += cert.corner_checked && !cert.corner_ok;
      max_diff = std::max(max_diff, cert.max_abs_diff);
      max_ratio = std::max(max_ratio, cert.max_ratio_upper);

      const Vec direct = solve_tension(c, TensionMethod::direct).sigma;
      const Vec green = solve_tension(c, TensionMethod::green).sigma;
      const double rel = (green - direct).norm() / std::max(direct.norm(), std::numeric_limits<double>::min());
      max_tension = std::max(max_tension, rel);
      if (rel > 1e-10) ++res.violations;
    }
    res.violations += diff_fail + ratio_fail + min_fail + lower_fail + corner_fail;
    res.rows.push_back({std::to_string(n), std::to_string(seed), std::to_string(cfg.suite_samples),
                        std::to_string(diff_fail), std::to_string(ratio_fail), std::to_string(min_fail),
                        std::to_string(admissible), std::to_string(lower_fail), std::to_string(corner_checked),
                        std::to_string(corner_fail), num(max_diff), num(max_ratio),
                        admissible ? num(min_margin) : std::string(), num(max_tension)});
    res.status.termination = res.violations ? fmt::format("{} violations", res.violations) : "completed";
  };
}

// ---------------------------------------------------------------------------
// blowup_hunt

std::vector<std::string> blowup_header() {
  return {"n", "seed", "termination", "steps", "t_final", "accepted", "rejection", "T_est", "p_curvature",
          "p_angular", "residual_curvature", "residual_angular", "window"};
}

TaskFn blowup_task(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  return [&cfg, n, seed](TaskResult& r) {
    const ChainState init = make_initial(cfg.generator, n, cfg.params, seed);
    const Trajectory tr = run(init, cfg.integrator);
    emit(cfg, tr, stem("blowup", n, seed));
    note_termination(r, tr);
    std::vector<BlowupSample> samples;
    for (const Snapshot& s : tr.snapshots) samples.push_back({s.state.time, s.max_link_speed, s.max_curvature});
    const BlowupResult b = detect_blowup(samples, cfg.blowup);
    std::vector<std::string> row{std::to_string(n), std::to_string(seed), r.status.termination, std::to_string(tr.steps),
                                 num(tr.snapshots.back().state.time), b.accepted() ? "true" : "false", b.rejection};
    if (b.accepted()) {
      const BlowupFit& f = *b.fit;
      row.insert(row.end(), {num(f.T_est), num(f.p_curvature), num(f.p_angular), num(f.residual_curvature),
                             num(f.residual_angular), std::to_string(f.window)});
    } else {
      row.insert(row.end(), 6, std::string());
    }
    r.rows.push_back(std::move(row));
  };
}

// ---------------------------------------------------------------------------

void write_manifest(const ExperimentConfig& cfg, RunManifest& m) {
  const fs::path path = cfg.output_dir / "manifest.json";
  m.files.clear();
  std::vector<fs::path> found;
  for (const auto& entry : fs::recursive_directory_iterator(cfg.output_dir))
    if (entry.is_regular_file() && entry.path() != path) found.push_back(entry.path());
  std::sort(found.begin(), found.end());
  for (const fs::path& p : found) m.files.push_back({fs::relative(p, cfg.output_dir).generic_string(), fs::file_size(p), sha256_file(p)});

  nlohmann::json j;
  j["kind"] = m.kind;
  j["config_path"] = m.config_path;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["status"] = m.complete ? "complete" : "incomplete";
  if (!m.error.empty()) j["error"] = m.error;
  j["violations"] = m.violations;
  j["numeric_failures"] = m.numeric_failures;
  j["tasks"] = nlohmann::json::array();
  for (const TaskStatus& t : m.tasks) j["tasks"].push_back({{"label", t.label}, {"termination", t.termination}});
  j["files"] = nlohmann::json::array();
  for (const FileEntry& f : m.files) j["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  j["files"].push_back({{"path", "manifest.json"}});
  m.files.push_back({"manifest.json", 0, ""});

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunManifest m;
  m.kind = to_string(cfg.kind);
  m.config_path = cfg.source.string();
  m.config_hash = cfg.config_hash;
  m.version = library_version();
  m.started = utc_now();

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.output_dir.string() + ": " + ec.message());

  std::vector<int> ns = cfg.n;
  std::vector<std::pair<std::string, TaskFn>> tasks;
  std::vector<std::string> header;
  std::string table;

  switch (cfg.kind) {
    case ExperimentKind::run:
      header = run_header();
      table = "summary.csv";
      for (int n : ns)
        for (std::uint64_t s : cfg.seeds) tasks.emplace_back(stem("run", n, s), run_task(cfg, n, s));
      break;
    case ExperimentKind::convergence:
      header = convergence_header();
      table = "convergence.csv";
      std::sort(ns.begin(), ns.end());
      ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
      for (std::uint64_t s : cfg.seeds)
        for (int n : ns) tasks.emplace_back(stem("convergence", n, s), convergence_task(cfg, n, ns.front(), s));
      break;
    case ExperimentKind::inequality_suite:
      header = suite_header();
      table = "inequality_suite.csv";
      for (int n : ns)
        for (std::size_t i = 0; i < cfg.suite_r.size(); ++i)
          for (std::uint64_t s : cfg.seeds)
            tasks.emplace_back(fmt::format("suite_n{}_r{}_s{}", n, cfg.suite_r[i], s), suite_task(cfg, n, cfg.suite_r[i], i, s));
      break;
    case ExperimentKind::green_certify:
      header = certify_header();
      table = "green_certify.csv";
      for (int n : ns)
        for (std::uint64_t s : cfg.seeds) tasks.emplace_back(stem("certify", n, s), certify_task(cfg, n, s));
      break;
    case ExperimentKind::blowup_hunt:
      header = blowup_header();
      table = "blowup.csv";
      for (int n : ns)
        for (std::uint64_t s : cfg.seeds) tasks.emplace_back(stem("blowup", n, s), blowup_task(cfg, n, s));
      break;
  }

  std::vector<TaskResult> results = run_tasks(tasks, cfg.workers, opts.quiet);
  std::exception_ptr fatal;
  try {
    if (cfg.kind == ExperimentKind::convergence) finish_convergence(cfg, ns, results);
    std::vector<std::vector<std::string>> rows;
    for (TaskResult& r : results) {
      m.tasks.push_back(r.status);
      m.violations += r.violations;
      m.numeric_failures += r.numeric_failure;
      if (r.fatal && !fatal) fatal = r.fatal;
      for (auto& row : r.rows) rows.push_back(std::move(row));
    }
    write_table(cfg.output_dir / table, header, rows);
  } catch (...) {
    if (!fatal) fatal = std::current_exception();
  }

  m.complete = !fatal;
  if (fatal) {
    try {
      std::rethrow_exception(fatal);
    } catch (const std::exception& e) {
      m.error = e.what();
    }
  }
  m.finished = utc_now();
  write_manifest(cfg, m);
  if (fatal) std::rethrow_exception(fatal);
  return m;
}

int exit_code(const RunManifest& m) {
  if (m.numeric_failures > 0) return 3;
  if (m.violations > 0) return 4;
  return 0;
}

}  // namespace whip

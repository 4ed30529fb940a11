#include "whip/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace whip {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::run: return "run";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::inequality_suite: return "inequality_suite";
    case ExperimentKind::green_certify: return "green_certify";
    case ExperimentKind::blowup_hunt: return "blowup_hunt";
  }
  return "unknown";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key, "empty list entry");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

ExperimentKind to_kind(const std::string& v) {
  for (ExperimentKind k : {ExperimentKind::run, ExperimentKind::convergence, ExperimentKind::inequality_suite,
                           ExperimentKind::green_certify, ExperimentKind::blowup_hunt})
    if (to_string(k) == v) return k;
  throw ConfigError("kind", "unknown experiment kind '" + v + "'");
}

using Entries = std::vector<std::pair<std::string, std::string>>;

Entries read_entries(const std::string& text) {
  Entries out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": missing key");
    if (!section.empty()) key = section + "." + key;
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.config_hash = sha256_hex(text);
  const Entries entries = read_entries(text);

  bool have_kind = false, have_n = false, have_samples = false, have_fraction = false;
  std::vector<std::pair<std::string, std::string>> generator_params;
  IntegratorConfig& ic = cfg.integrator;

  for (const auto& [key, value] : entries) {
    if (key == "kind") {
      cfg.kind = to_kind(value);
      have_kind = true;
    } else if (key == "n") {
      cfg.n.clear();
      for (const auto& v : split_list(key, value)) {
        const long long n = to_int(key, v);
        if (n < 2) throw ConfigError(key, "every n must be >= 2, got " + v);
        cfg.n.push_back(static_cast<int>(n));
      }
      have_n = true;
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& v : split_list(key, value)) {
        const long long s = to_int(key, v);
        if (s < 0) throw ConfigError(key, "seeds must be non-negative");
        cfg.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    } else if (key == "output_dir") {
      if (value.empty()) throw ConfigError(key, "empty path");
      cfg.output_dir = value;
    } else if (key == "formats") {
      cfg.csv = cfg.jsonl = false;
      for (const auto& v : split_list(key, value)) {
        if (v == "csv") cfg.csv = true;
        else if (v == "jsonl") cfg.jsonl = true;
        else throw ConfigError(key, "unknown format '" + v + "'");
      }
    } else if (key == "workers") {
      const long long w = to_int(key, value);
      if (w < 1) throw ConfigError(key, "must be >= 1");
      cfg.workers = static_cast<int>(w);
    } else if (key == "initial_data.generator") {
      cfg.generator = value;
    } else if (key.rfind("initial_data.", 0) == 0) {
      generator_params.emplace_back(key, value);
    } else if (key == "integrator.scheme") {
      if (value == "rk4") ic.scheme = Scheme::rk4;
      else if (value == "heun") ic.scheme = Scheme::heun;
      else throw ConfigError(key, "unknown scheme '" + value + "'");
    } else if (key == "integrator.cfl") {
      ic.cfl = to_double(key, value);
    } else if (key == "integrator.dt_max") {
      ic.dt_max = to_double(key, value);
    } else if (key == "integrator.dt_min") {
      ic.dt_min = to_double(key, value);
    } else if (key == "integrator.project") {
      ic.project = to_bool(key, value);
    } else if (key == "integrator.halt_on_negative_tension") {
      ic.halt_on_negative_tension = to_bool(key, value);
    } else if (key == "integrator.t_end") {
      ic.t_end = to_double(key, value);
    } else if (key == "integrator.report_stride") {
      ic.report_stride = static_cast<int>(to_int(key, value));
    } else if (key == "integrator.m_max") {
      ic.m_max = static_cast<int>(to_int(key, value));
    } else if (key == "integrator.blowup_curvature_fraction") {
      ic.blowup_curvature_fraction = to_double(key, value);
      have_fraction = true;
    } else if (key == "suite.samples") {
      const long long s = to_int(key, value);
      if (s < 1) throw ConfigError(key, "must be >= 1");
      cfg.suite_samples = static_cast<int>(s);
      have_samples = true;
    } else if (key == "suite.r") {
      cfg.suite_r.clear();
      for (const auto& v : split_list(key, value)) {
        const double r = to_double(key, v);
        if (!(r > 0.0)) throw ConfigError(key, "weight exponents must be positive");
        cfg.suite_r.push_back(r);
      }
    } else if (key == "suite.max_turn") {
      cfg.suite_max_turn = to_double(key, value);
      if (!(cfg.suite_max_turn > 0.0 && cfg.suite_max_turn < M_PI / 2))
        throw ConfigError(key, "must lie in (0, pi/2) so that every alpha is positive");
    } else if (key == "blowup.window_fraction") {
      cfg.blowup.window_fraction = to_double(key, value);
      if (!(cfg.blowup.window_fraction > 0.0 && cfg.blowup.window_fraction <= 1.0)) throw ConfigError(key, "must lie in (0, 1]");
    } else if (key == "blowup.min_points") {
      cfg.blowup.min_points = static_cast<int>(to_int(key, value));
      if (cfg.blowup.min_points < 3) throw ConfigError(key, "must be >= 3");
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  if (!have_kind) throw ConfigError("kind", "missing required key");
  if (!have_n) throw ConfigError("n", "missing required key");

  const bool needs_generator = cfg.kind == ExperimentKind::run || cfg.kind == ExperimentKind::convergence ||
                               cfg.kind == ExperimentKind::blowup_hunt;
  if (needs_generator) {
    if (cfg.generator.empty()) {
      if (cfg.kind != ExperimentKind::blowup_hunt) throw ConfigError("initial_data.generator", "missing required key");
      cfg.generator = "near_loop";
    }
    std::vector<std::string> known;
    try {
      known = generator_parameters(cfg.generator);
    } catch (const UnknownGenerator&) {
      throw ConfigError("initial_data.generator", "unknown generator '" + cfg.generator + "'");
    }
    for (const auto& [key, value] : generator_params) {
      const std::string name = key.substr(std::string("initial_data.").size());
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError(key, "generator '" + cfg.generator + "' has no such parameter");
      cfg.params[name] = to_double(key, value);
    }
  } else if (!cfg.generator.empty() || !generator_params.empty()) {
    const std::string key = cfg.generator.empty() ? generator_params.front().first : "initial_data.generator";
    throw ConfigError(key, "not used by kind " + to_string(cfg.kind));
  }

  if (cfg.kind == ExperimentKind::convergence && cfg.n.size() < 2)
    throw ConfigError("n", "convergence needs at least two resolutions");
  if (cfg.kind == ExperimentKind::blowup_hunt && !have_fraction) ic.blowup_curvature_fraction = 0.7;
  if (!have_samples) cfg.suite_samples = cfg.kind == ExperimentKind::inequality_suite ? 10000 : 1000;

  try {
    ic.validate();
  } catch (const DomainError& e) {
    throw ConfigError("integrator", e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config_text(ss.str());
  cfg.source = path;
  return cfg;
}

}  // namespace whip

#include "whip/series_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace whip {

namespace {

using nlohmann::json;

int energy_order(const Trajectory& tr) { return static_cast<int>(tr.snapshots.front().report.e.size()) - 1; }

std::vector<double> scalar_row(const Snapshot& s) {
  const EnergyReport& r = s.report;
  std::vector<double> row{s.state.time};
  row.insert(row.end(), r.e.begin(), r.e.end());
  row.insert(row.end(), r.e_tilde.begin(), r.e_tilde.end());
  row.insert(row.end(), {r.u0, r.v0, r.a, r.b, r.c});
  row.insert(row.end(), r.d.begin(), r.d.end());
  row.insert(row.end(), {s.tension.min_sigma, s.max_link_speed, s.max_curvature, r.constraint_drift,
                         r.orthogonality_drift, s.ratio_a, s.ratio_c, s.ratio_d, s.gronwall});
  return row;
}

void require_nonempty(const Trajectory& tr) {
  if (tr.snapshots.empty()) throw std::invalid_argument("cannot emit an empty trajectory");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

json points(const Mat& m) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    json p = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) p.push_back(m(i, k));
    arr.push_back(std::move(p));
  }
  return arr;
}

json values(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(std::isfinite(v(i)) ? json(v(i)) : json(nullptr));
  return arr;
}

json scalar(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double read_scalar(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Mat read_points(const json& arr, int d, const std::string& what) {
  Mat m(d, arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (arr[k].size() != static_cast<std::size_t>(d)) throw IoError(what + ": point of wrong dimension");
    for (int i = 0; i < d; ++i) m(i, k) = arr[k][i].get<double>();
  }
  return m;
}

Vec read_values(const json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = read_scalar(arr[i]);
  return v;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_columns(int m_max) {
  std::vector<std::string> cols{"t"};
  for (int m = 0; m <= m_max; ++m) cols.push_back(fmt::format("e{}", m));
  for (int m = 0; m <= m_max; ++m) cols.push_back(fmt::format("et{}", m));
  for (const char* c : {"u0", "v0", "a", "b", "c"}) cols.emplace_back(c);
  for (int m = 1; m <= m_max; ++m) cols.push_back(fmt::format("d{}", m));
  for (const char* c : {"min_sigma", "max_link_speed", "max_curvature", "constraint_drift", "orthogonality_drift",
                        "ratio_a", "ratio_c", "ratio_d", "gronwall"})
    cols.emplace_back(c);
  return cols;
}

void write_csv(const Trajectory& tr, const std::filesystem::path& path) {
  require_nonempty(tr);
  const std::vector<std::string> cols = csv_columns(energy_order(tr));
  std::string text;
  for (std::size_t i = 0; i < cols.size(); ++i) text += (i ? "," : "") + csv_field(cols[i]);
  text += "\r\n";
  for (const Snapshot& s : tr.snapshots) {
    const std::vector<double> row = scalar_row(s);
    if (row.size() != cols.size()) throw std::logic_error("write_csv: snapshots disagree on energy order");
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_double(row[i]);
    text += "\r\n";
  }
  std::ofstream out = open_out(path);
  out << text;
  close_out(out, path);
}

void write_jsonl(const Trajectory& tr, const std::filesystem::path& path) {
  require_nonempty(tr);
  const std::vector<std::string> cols = csv_columns(energy_order(tr));
  std::string text;
  for (const Snapshot& s : tr.snapshots) {
    const std::vector<double> row = scalar_row(s);
    json obj;
    for (std::size_t i = 0; i < cols.size(); ++i) obj[cols[i]] = scalar(row[i]);
    obj["n"] = s.state.n;
    obj["d"] = s.state.d;
    obj["eta"] = points(s.state.eta);
    obj["eta_dot"] = points(s.state.eta_dot);
    obj["sigma"] = values(s.tension.sigma);
    obj["sigma_dot"] = values(s.sigma_dot);
    text += obj.dump() + "\n";
  }
  std::ofstream out = open_out(path);
  out << text;
  close_out(out, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      rec.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(rec));
      rec.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError(path.string() + ": unterminated quoted field");
  if (any) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  return table;
}

std::vector<StoredSnapshot> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<StoredSnapshot> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      const json obj = json::parse(line);
      StoredSnapshot s;
      s.state.n = obj.at("n").get<int>();
      s.state.d = obj.at("d").get<int>();
      s.state.time = read_scalar(obj.at("t"));
      s.state.eta = read_points(obj.at("eta"), s.state.d, where);
      s.state.eta_dot = read_points(obj.at("eta_dot"), s.state.d, where);
      s.sigma = read_values(obj.at("sigma"));
      s.sigma_dot = read_values(obj.at("sigma_dot"));
      if (s.state.eta.cols() != s.state.n + 1) throw IoError(where + ": eta has the wrong length");
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw IoError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace whip

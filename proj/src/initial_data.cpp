#include "whip/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace whip {

ChainState chain_from_angles(const Vec& theta, const Vec& theta_dot, double time) {
  if (theta.size() != theta_dot.size()) throw SizeError("chain_from_angles: angle and rate lengths differ");
  const Eigen::Index n = theta.size();
  Mat links(2, n), vel(2, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double c = std::cos(theta(k)), s = std::sin(theta(k));
    links.col(k) << c, s;
    vel.col(k) << -s * theta_dot(k), c * theta_dot(k);
  }
  return ChainState::from_links(links, vel, time);
}

namespace {

struct Generator {
  std::vector<std::pair<std::string, double>> defaults;
  std::function<ChainState(int, const ParamMap&, std::uint64_t)> build;
};

double midpoint(int k, int n) { return (k + 0.5) / n; }  // k is 0-based

const std::map<std::string, Generator>& registry() {
  static const std::map<std::string, Generator> table = {
      {"straight",
       {{{"angle", 0.0}},
        [](int n, const ParamMap& p, std::uint64_t) {
          return chain_from_angles(Vec::Constant(n, p.at("angle")), Vec::Zero(n));
        }}},
      {"rigid_rotation",
       {{{"omega", 1.0}, {"angle", 0.0}},
        [](int n, const ParamMap& p, std::uint64_t) {
          return chain_from_angles(Vec::Constant(n, p.at("angle")), Vec::Constant(n, p.at("omega")));
        }}},
      {"folded",
       {{{"omega", 1.0}, {"fold", 0.5}},
        [](int n, const ParamMap& p, std::uint64_t) {
          const int m = std::clamp(static_cast<int>(std::lround(p.at("fold") * n)), 1, n - 1);
          Vec th(n), om(n);
          for (int k = 0; k < n; ++k) {
            th(k) = k < m ? M_PI : 0.0;
            om(k) = k < m ? 0.0 : p.at("omega");
          }
          return chain_from_angles(th, om);
        }}},
      {"perturbed",
       {{{"amplitude", 0.1}, {"modes", 3.0}},
        [](int n, const ParamMap& p, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          std::normal_distribution<double> normal;
          const int modes = std::max(1, static_cast<int>(p.at("modes")));
          std::vector<double> c(modes);
          for (int m = 0; m < modes; ++m) c[m] = normal(rng) / (m + 1);
          Vec om(n);
          for (int k = 0; k < n; ++k) {
            double v = 0.0;
            for (int m = 0; m < modes; ++m) v += c[m] * std::cos(m * M_PI * midpoint(k, n));
            om(k) = p.at("amplitude") * v;
          }
          return chain_from_angles(Vec::Constant(n, -M_PI / 2), om);
        }}},
      {"log_spiral",
       {{{"omega", 1.0}},
        [](int n, const ParamMap& p, std::uint64_t) {
          Vec th(n);
          for (int k = 0; k < n; ++k) th(k) = 2.0 / 3.0 * std::log(midpoint(k, n)) + std::atan(2.0 / 3.0) + M_PI;
          return chain_from_angles(th, Vec::Constant(n, p.at("omega")));
        }}},
      {"power_angle",
       {{{"q", 0.75}, {"scale", 1.0}, {"omega", 1.0}},
        [](int n, const ParamMap& p, std::uint64_t) {
          Vec th(n);
          for (int k = 0; k < n; ++k) th(k) = p.at("scale") * std::pow(midpoint(k, n), p.at("q"));
          return chain_from_angles(th, Vec::Constant(n, p.at("omega")));
        }}},
      {"near_loop",
       {{{"turn", 6.0}, {"width", 0.12}, {"center", 0.6}, {"omega", 3.0}, {"angle", 0.0}},
        [](int n, const ParamMap& p, std::uint64_t) {
          const double w = p.at("width");
          if (!(w > 0.0)) throw DomainError("near_loop: width must be positive");
          Vec th(n);
          for (int k = 0; k < n; ++k) {
            const double x = (midpoint(k, n) - p.at("center")) / w;
            th(k) = p.at("angle") + p.at("turn") * 0.5 * (1.0 + std::tanh(x));
          }
          return chain_from_angles(th, Vec::Constant(n, p.at("omega")));
        }}},
  };
  return table;
}

const Generator& lookup(const std::string& name) {
  const auto& table = registry();
  const auto it = table.find(name);
  if (it == table.end()) throw UnknownGenerator("unknown initial-data generator '" + name + "'");
  return it->second;
}

}  // namespace

ChainState make_initial(const std::string& generator, int n, const ParamMap& params, std::uint64_t seed) {
  const Generator& g = lookup(generator);
  if (n < 2) throw DomainError("initial data: n must be >= 2");
  ParamMap full;
  for (const auto& [k, v] : g.defaults) full[k] = v;
  for (const auto& [k, v] : params) {
    if (!full.count(k)) throw DomainError("generator '" + generator + "' has no parameter '" + k + "'");
    full[k] = v;
  }
  return g.build(n, full, seed);
}

std::vector<std::string> generator_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::vector<std::string> generator_parameters(const std::string& generator) {
  std::vector<std::string> out;
  for (const auto& [k, v] : lookup(generator).defaults) out.push_back(k);
  return out;
}

}  // namespace whip

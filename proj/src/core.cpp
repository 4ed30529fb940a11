#include "whip/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace whip {

namespace {

void require_length(Eigen::Index len, Eigen::Index min_len, const char* what) {
  if (len < min_len) {
    throw SizeError(std::string(what) + ": need at least " + std::to_string(min_len) +
                    " entries, got " + std::to_string(len));
  }
}

bool is_nonneg_integer(double r) { return r >= 0.0 && r == std::floor(r) && r < 1e6; }

// Squared magnitude of entry i for either sequence kind.
double sq(const Vec& f, Eigen::Index i) { return f(i) * f(i); }
double sq(const Mat& f, Eigen::Index i) { return f.col(i).squaredNorm(); }

Eigen::Index count(const Vec& f) { return f.size(); }
Eigen::Index count(const Mat& f) { return f.cols(); }

template <class Seq>
double seminorm_sq_impl(const Seq& f, double r, int m, int n, int first_index) {
  if (m < 0) throw DomainError("weighted_seminorm: difference order must be >= 0");
  require_length(count(f), m + 1, "weighted_seminorm");
  const Seq diff = forward_diff(f, n, m);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < count(diff); ++i) {
    const int k = first_index + static_cast<int>(i);
    acc += rising_weight(k, r, n) * sq(diff, i);
  }
  return acc / n;
}

template <class Seq>
double supnorm_sq_impl(const Seq& f, double r, int m, int n, int first_index) {
  if (m < 0) throw DomainError("weighted_supnorm: difference order must be >= 0");
  require_length(count(f), m + 1, "weighted_supnorm");
  const Seq diff = forward_diff(f, n, m);
  double best = 0.0;
  for (Eigen::Index i = 0; i < count(diff); ++i) {
    const int k = first_index + static_cast<int>(i);
    best = std::max(best, rising_weight(k, r, n) * sq(diff, i));
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------

Vec forward_diff(const Vec& f, int n) {
  require_length(f.size(), 2, "forward_diff");
  const Eigen::Index len = f.size() - 1;
  return static_cast<double>(n) * (f.tail(len) - f.head(len));
}

Mat forward_diff(const Mat& f, int n) {
  require_length(f.cols(), 2, "forward_diff");
  const Eigen::Index len = f.cols() - 1;
  return static_cast<double>(n) * (f.rightCols(len) - f.leftCols(len));
}

Vec forward_diff(const Vec& f, int n, int order) {
  require_length(f.size(), order + 1, "forward_diff");
  Vec out = f;
  for (int i = 0; i < order; ++i) out = forward_diff(out, n);
  return out;
}

Mat forward_diff(const Mat& f, int n, int order) {
  require_length(f.cols(), order + 1, "forward_diff");
  Mat out = f;
  for (int i = 0; i < order; ++i) out = forward_diff(out, n);
  return out;
}

Vec backward_diff(const Vec& f, int n) { return forward_diff(f, n); }
Mat backward_diff(const Mat& f, int n) { return forward_diff(f, n); }

Vec shift(const Vec& f, int j) {
  require_length(f.size(), j + 1, "shift");
  return f.tail(f.size() - j);
}

Mat shift(const Mat& f, int j) {
  require_length(f.cols(), j + 1, "shift");
  return f.rightCols(f.cols() - j);
}

// ---------------------------------------------------------------------------

double rising_weight(int k, double r, int n) {
  if (r <= -1.0) throw DomainError("rising_weight: exponent must exceed -1, got " + std::to_string(r));
  if (k < 0) throw DomainError("rising_weight: index must be >= 0");
  if (n < 1) throw DomainError("rising_weight: n must be positive");
  if (r == 0.0) return 1.0;
  if (k == 0) return 0.0;
  if (is_nonneg_integer(r)) {
    double w = 1.0;
    const int ri = static_cast<int>(r);
    for (int i = 0; i < ri; ++i) w *= static_cast<double>(k + i) / n;
    return w;
  }
  return std::exp(std::lgamma(k + r) - std::lgamma(static_cast<double>(k)) - r * std::log(static_cast<double>(n)));
}

double WeightedSeminorm::value() const { return std::sqrt(squared); }

double weighted_seminorm_sq(const Vec& f, double r, int m, int n, int first_index) {
  return seminorm_sq_impl(f, r, m, n, first_index);
}

double weighted_seminorm_sq(const Mat& f, double r, int m, int n, int first_index) {
  return seminorm_sq_impl(f, r, m, n, first_index);
}

WeightedSeminorm weighted_seminorm(const Mat& f, double r, int m, int n, int first_index) {
  return {r, m, weighted_seminorm_sq(f, r, m, n, first_index)};
}

double weighted_supnorm_sq(const Vec& f, double r, int m, int n, int first_index) {
  return supnorm_sq_impl(f, r, m, n, first_index);
}

double weighted_supnorm_sq(const Mat& f, double r, int m, int n, int first_index) {
  return supnorm_sq_impl(f, r, m, n, first_index);
}

// ---------------------------------------------------------------------------

ChainState ChainState::from_links(const Mat& links, const Mat& link_velocities, double time) {
  if (links.cols() < 1) throw SizeError("from_links: need at least one link");
  if (links.rows() != link_velocities.rows() || links.cols() != link_velocities.cols()) {
    throw SizeError("from_links: link and link-velocity shapes differ");
  }
  ChainState c;
  c.n = static_cast<int>(links.cols());
  c.d = static_cast<int>(links.rows());
  c.time = time;
  c.eta = Mat::Zero(c.d, c.n + 1);
  c.eta_dot = Mat::Zero(c.d, c.n + 1);
  const double h = 1.0 / c.n;
  for (int k = c.n - 1; k >= 0; --k) {
    c.eta.col(k) = c.eta.col(k + 1) - h * links.col(k);
    c.eta_dot.col(k) = c.eta_dot.col(k + 1) - h * link_velocities.col(k);
  }
  return c;
}

Mat ChainState::links() const { return forward_diff(eta, n); }

Mat ChainState::link_velocities() const { return forward_diff(eta_dot, n); }

ConstraintDrift ChainState::drift() const {
  const Mat l = links();
  const Mat lv = link_velocities();
  ConstraintDrift out;
  for (int k = 0; k < n; ++k) {
    out.length = std::max(out.length, std::abs(l.col(k).norm() - 1.0));
    out.orthogonality = std::max(out.orthogonality, std::abs(l.col(k).dot(lv.col(k))));
  }
  return out;
}

void ChainState::validate(const ConstraintTolerance& tol) const {
  if (n < 1) throw DomainError("chain: n must be positive");
  if (d < 2) throw DomainError("chain: ambient dimension must be >= 2");
  if (eta.rows() != d || eta.cols() != n + 1 || eta_dot.rows() != d || eta_dot.cols() != n + 1) {
    throw SizeError("chain: position/velocity arrays must be d x (n+1)");
  }
  if (!eta.allFinite() || !eta_dot.allFinite()) throw NumericError("chain: non-finite state");
  if (!eta.col(n).isZero(0.0) || !eta_dot.col(n).isZero(0.0)) {
    throw DomainError("chain: fixed end must sit at the origin with zero velocity");
  }
  const ConstraintDrift dr = drift();
  if (dr.length > tol.length) {
    throw DomainError("chain: link length drift " + std::to_string(dr.length) + " exceeds tolerance");
  }
  if (dr.orthogonality > tol.orthogonality) {
    throw DomainError("chain: velocity not tangent to constraint (drift " + std::to_string(dr.orthogonality) + ")");
  }
}

// ---------------------------------------------------------------------------

Vec even_extend(const Vec& sigma) {
  if (sigma.size() < 2) throw SizeError("even_extend: need sigma_0..sigma_n with n >= 1");
  const int n = static_cast<int>(sigma.size()) - 1;
  Vec out(2 * n + 2);
  out.head(n + 1) = sigma;
  for (int k = n + 1; k <= 2 * n + 1; ++k) out(k) = sigma(2 * n + 1 - k);
  return out;
}

ExtendedChain odd_extend(const ChainState& chain) {
  const int n = chain.n;
  ExtendedChain ext;
  ext.base = chain;
  ext.eta_ext.resize(chain.d, 2 * n + 1);
  ext.eta_dot_ext.resize(chain.d, 2 * n + 1);
  ext.eta_ext.leftCols(n + 1) = chain.eta;
  ext.eta_dot_ext.leftCols(n + 1) = chain.eta_dot;
  // column c holds eta_{c+1}; eta_k = -eta_{2n+2-k} for k > n+1.
  for (int k = n + 2; k <= 2 * n + 1; ++k) {
    ext.eta_ext.col(k - 1) = -chain.eta.col(2 * n + 2 - k - 1);
    ext.eta_dot_ext.col(k - 1) = -chain.eta_dot.col(2 * n + 2 - k - 1);
  }
  return ext;
}

ExtendedChain odd_extend(const ChainState& chain, const Vec& sigma) {
  if (sigma.size() != chain.n + 1) throw SizeError("odd_extend: sigma must hold sigma_0..sigma_n");
  ExtendedChain ext = odd_extend(chain);
  ext.sigma_ext = even_extend(sigma);
  return ext;
}

// ---------------------------------------------------------------------------

double kinetic_u0(const ChainState& chain) {
  double acc = 0.0;
  for (int k = 0; k < chain.n; ++k) acc += chain.eta_dot.col(k).squaredNorm();
  return acc / chain.n;
}

double potential_v0(const ChainState& chain) {
  const Mat l = chain.links();
  double acc = 0.0;
  for (int k = 1; k <= chain.n; ++k) acc += rising_weight(k, 1.0, chain.n) * l.col(k - 1).squaredNorm();
  return acc / chain.n;
}

namespace {

// Per-level sums of the energy: level ℓ contributes
//   (1/n) Σ_{k=1}^{n-⌊ℓ/2⌋} ( w_vel(k,ℓ) |∇₊^ℓ η̇_k|² + w_pos(k,ℓ+1) |∇₊^{ℓ+1} η_k|² ).
template <class Weight>
std::vector<double> energy_levels(const ChainState& chain, int m_max, Weight&& weight) {
  if (m_max < 0) throw DomainError("energy: m_max must be >= 0");
  const int n = chain.n;
  const ExtendedChain ext = odd_extend(chain);
  std::vector<double> levels(m_max + 1, 0.0);
  Mat dv = ext.eta_dot_ext;                   // ∇₊^ℓ η̇, column c at index c+1
  Mat dp = forward_diff(ext.eta_ext, n);      // ∇₊^{ℓ+1} η
  for (int l = 0; l <= m_max; ++l) {
    const int k_max = n - l / 2;
    if (k_max < 1) throw SizeError("energy: order too high for this n");
    if (dp.cols() < k_max) throw SizeError("energy: odd extension too short for order " + std::to_string(l));
    double acc = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      acc += weight(k, l) * dv.col(k - 1).squaredNorm() + weight(k, l + 1) * dp.col(k - 1).squaredNorm();
    }
    levels[l] = acc / n;
    if (l < m_max) {
      dv = forward_diff(dv, n);
      dp = forward_diff(dp, n);
    }
  }
  return levels;
}

std::vector<double> cumulative(std::vector<double> levels) {
  for (std::size_t i = 1; i < levels.size(); ++i) levels[i] += levels[i - 1];
  return levels;
}

}  // namespace

std::vector<double> discrete_energy(const ChainState& chain, int m_max) {
  const int n = chain.n;
  return cumulative(energy_levels(chain, m_max, [n](int k, int r) { return rising_weight(k, r, n); }));
}

std::vector<double> sigma_weighted_energy(const ChainState& chain, const Vec& sigma_ext, int m_max) {
  if (m_max < 0) throw DomainError("energy: m_max must be >= 0");
  if (sigma_ext.size() == 0) throw DependencyError("sigma_weighted_energy: no tension supplied");
  const int n = chain.n;
  // Largest index touched: k + r - 1 with k = n - ⌊ℓ/2⌋, r = ℓ + 1.
  const int need = n - m_max / 2 + m_max;
  if (sigma_ext.size() <= need) {
    throw SizeError("sigma_weighted_energy: tension sequence must reach index " + std::to_string(need));
  }
  auto weight = [&sigma_ext](int k, int r) {
    double w = 1.0;
    for (int j = k; j < k + r; ++j) w *= sigma_ext(j);
    return w;
  };
  return cumulative(energy_levels(chain, m_max, weight));
}

}  // namespace whip

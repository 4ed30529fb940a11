#include "whip/spectral.hpp"

#include "whip/initial_data.hpp"

#include <boost/math/special_functions/gegenbauer.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace whip {

namespace {

double rho(double s) { return s * (2.0 - s); }

double rho_k(int k, int n) { return static_cast<double>(k) * (2.0 * n + 1.0 - k) / (static_cast<double>(n) * n); }

void require_modes(int m, const char* what) {
  if (m < 1) throw DomainError(std::string(what) + ": mode index must be >= 1");
}

// P_r^{(k)}(x); Gegenbauer with λ = 1/2 is Legendre.
double legendre_deriv(int r, double x, int k) {
  if (k > r) return 0.0;
  if (k == 0) return boost::math::legendre_p(r, x);
  return boost::math::gegenbauer_derivative(static_cast<unsigned>(r), 0.5, x, static_cast<unsigned>(k));
}

double Q_raw(int m, double s, int deriv) {
  const double sign = deriv % 2 == 0 ? 1.0 : -1.0;
  return sign * legendre_deriv(2 * m - 1, 1.0 - s, deriv + 1);
}

double K_factor(int m) {
  static std::shared_mutex mu;
  static std::map<int, double> cache;
  {
    std::shared_lock lock(mu);
    const auto it = cache.find(m);
    if (it != cache.end()) return it->second;
  }
  const Quadrature q = gauss_legendre01(2 * m + 2);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
    const double v = Q_raw(m, q.nodes(i), 0);
    acc += q.weights(i) * rho(q.nodes(i)) * v * v;
  }
  const double K = 1.0 / std::sqrt(acc);
  std::unique_lock lock(mu);
  cache.emplace(m, K);
  return K;
}

// Hahn (α = β = 0) polynomial of degree r on x = 0..M, up to scale, through
// the difference equation in x:
//   (x+1)(x-M) y(x+1) = ((x+1)(x-M) + x(x-M-1) + r(r+1)) y(x) - x(x-M-1) y(x-1).
// Runs to the midpoint and reflects with y(M-x) = (-1)^r y(x).
Vec hahn_values(int r, int M) {
  Vec y(M + 1);
  y(0) = 1.0;
  const int half = M / 2;
  const double lambda = static_cast<double>(r) * (r + 1);
  for (int x = 0; x < half; ++x) {
    const double B = (x + 1.0) * (x - static_cast<double>(M));
    const double D = x * (x - M - 1.0);
    const double prev = x > 0 ? y(x - 1) : 0.0;
    y(x + 1) = ((B + D + lambda) * y(x) - D * prev) / B;
    if (std::abs(y(x + 1)) > 1e150) y.head(x + 2) *= 1e-150;
  }
  const double parity = r % 2 == 0 ? 1.0 : -1.0;
  for (int x = half + 1; x <= M; ++x) y(x) = parity * y(M - x);
  return y;
}

Vec project_onto(const Vec& theta, const Mat& table) {
  const int n = static_cast<int>(theta.size());
  Vec weighted(n);
  for (int k = 1; k <= n; ++k) weighted(k - 1) = rho_k(k, n) * theta(k - 1);
  return table.leftCols(n) * weighted / n;
}

}  // namespace

// ---------------------------------------------------------------------------

AngleState eta_to_theta(const ChainState& chain) {
  if (chain.d != 2) throw UnsupportedDimension("angle representation needs d = 2, got d = " + std::to_string(chain.d));
  const Mat l = chain.links();
  const Mat lv = chain.link_velocities();
  AngleState out;
  out.n = chain.n;
  out.theta.resize(chain.n);
  out.theta_dot.resize(chain.n);
  for (int k = 0; k < chain.n; ++k) {
    const double raw = std::atan2(l(1, k), l(0, k));
    if (k == 0) {
      out.theta(k) = raw;
    } else {
      double delta = std::remainder(raw - out.theta(k - 1), 2.0 * M_PI);
      if (delta == -M_PI) delta = M_PI;
      out.theta(k) = out.theta(k - 1) + delta;
    }
    const double c = std::cos(out.theta(k)), s = std::sin(out.theta(k));
    out.theta_dot(k) = -s * lv(0, k) + c * lv(1, k);
  }
  return out;
}

ChainState theta_to_eta(const AngleState& angles, double time) {
  if (angles.theta.size() != angles.n || angles.theta_dot.size() != angles.n)
    throw SizeError("theta_to_eta: angle arrays do not match n");
  return chain_from_angles(angles.theta, angles.theta_dot, time);
}

Vec even_extend_angles(const Vec& theta) {
  const Eigen::Index n = theta.size();
  Vec out(2 * n);
  out.head(n) = theta;
  out.tail(n) = theta.reverse();
  return out;
}

// ---------------------------------------------------------------------------

double r_mj(int m, int j) {
  require_modes(m, "r_mj");
  if (j < 0) throw DomainError("r_mj: j must be >= 0");
  if (2 * m - j - 2 < 0) return 0.0;
  double prod = 1.0;
  for (int i = 2 * m - j - 1; i <= 2 * m + j; ++i) prod *= i;
  return prod / (2.0 * m * (2.0 * m - 1.0));
}

Vec basis_Q(int m, const Vec& s, int deriv) {
  require_modes(m, "basis_Q");
  if (deriv < 0) throw DomainError("basis_Q: derivative order must be >= 0");
  const double K = K_factor(m);
  Vec out(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) out(i) = K * Q_raw(m, s(i), deriv);
  return out;
}

std::shared_ptr<const Mat> hahn_table(int n) {
  if (n < 1) throw DomainError("hahn_table: n must be >= 1");
  static std::shared_mutex mu;
  static std::map<int, std::shared_ptr<const Mat>> cache;
  {
    std::shared_lock lock(mu);
    const auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  auto table = std::make_shared<Mat>(n, 2 * n);
  for (int m = 1; m <= n; ++m) {
    const Vec h = hahn_values(2 * m - 1, 2 * n);
    Vec q = h.tail(2 * n) - h.head(2 * n);  // q(k) = h(k) - h(k-1), k = 1..2n
    double norm = 0.0;
    for (int k = 1; k <= n; ++k) norm += rho_k(k, n) * q(k - 1) * q(k - 1);
    q /= std::sqrt(norm / n);
    if (q(0) < 0.0) q = -q;
    table->row(m - 1) = q.transpose();
  }
  std::unique_lock lock(mu);
  return cache.emplace(n, std::move(table)).first->second;
}

Vec basis_q(int m, int n) {
  require_modes(m, "basis_q");
  if (m > n) throw DomainError("basis_q: mode " + std::to_string(m) + " exceeds n = " + std::to_string(n));
  return hahn_table(n)->row(m - 1).transpose();
}

// ---------------------------------------------------------------------------

double discrete_inner(const Vec& f_ext, const Vec& g_ext, int j, int n) {
  if (f_ext.size() != 2 * n || g_ext.size() != 2 * n) throw SizeError("discrete_inner: sequences must have length 2n");
  if (j < 0 || j > n) throw DomainError("discrete_inner: need 0 <= j <= n");
  const Vec df = forward_diff(f_ext, n, j);
  const Vec dg = forward_diff(g_ext, n, j);
  double acc = 0.0;
  for (int k = 1; k <= n - j / 2; ++k) {
    double w = 1.0;
    for (int i = 0; i <= j; ++i) w *= rho_k(k + i, n);
    acc += w * df(k - 1) * dg(k - 1);
  }
  return acc / n;
}

double discrete_norm_sq(const Vec& theta, int j) {
  const Vec ext = even_extend_angles(theta);
  return discrete_inner(ext, ext, j, static_cast<int>(theta.size()));
}

Quadrature gauss_legendre01(int points) {
  if (points < 1) throw DomainError("gauss_legendre01: need at least one point");
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(points);
  Quadrature q;
  q.nodes.resize(points);
  q.weights.resize(points);
  int idx = 0;
  auto add = [&](double x) {
    const double dp = boost::math::legendre_p_prime(points, x);
    q.nodes(idx) = 0.5 * (1.0 + x);
    q.weights(idx) = 1.0 / ((1.0 - x * x) * dp * dp);  // half of the [-1,1] weight
    ++idx;
  };
  for (double z : zeros) {
    if (z == 0.0) {
      add(0.0);
    } else {
      add(z);
      add(-z);
    }
  }
  return q;
}

double continuous_norm_sq(const std::function<double(double)>& f_deriv_j, int j, int points) {
  if (j < 0) throw DomainError("continuous_norm_sq: j must be >= 0");
  const Quadrature q = gauss_legendre01(points);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.nodes.size(); ++i) {
    const double s = q.nodes(i);
    const double v = f_deriv_j(s);
    acc += q.weights(i) * std::pow(rho(s), j + 1) * v * v;
  }
  return acc;
}

double evaluate_continuous(const SpectralCoeffs& A, double s, int deriv) {
  if (A.basis != Basis::legendre_derived) throw DomainError("evaluate_continuous: coefficients are not in the continuous basis");
  double acc = 0.0;
  for (Eigen::Index m = 1; m <= A.coeffs.size(); ++m)
    if (A.coeffs(m - 1) != 0.0) acc += A.coeffs(m - 1) * K_factor(static_cast<int>(m)) * Q_raw(static_cast<int>(m), s, deriv);
  return acc;
}

double continuous_norm_sq(const SpectralCoeffs& A, int j, int points) {
  const int modes = static_cast<int>(A.coeffs.size());
  if (points <= 0) points = 2 * modes + j + 4;
  return continuous_norm_sq([&](double s) { return evaluate_continuous(A, s, j); }, j, points);
}

// ---------------------------------------------------------------------------

SpectralCoeffs project_continuous(const std::function<double(double)>& theta, int modes, int points) {
  require_modes(modes, "project_continuous");
  const Quadrature q = gauss_legendre01(points);
  Vec f(q.nodes.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = q.weights(i) * rho(q.nodes(i)) * theta(q.nodes(i));
  SpectralCoeffs out;
  out.basis = Basis::legendre_derived;
  out.coeffs.resize(modes);
  for (int m = 1; m <= modes; ++m) out.coeffs(m - 1) = f.dot(basis_Q(m, q.nodes));
  return out;
}

Vec discretize_Fn(const SpectralCoeffs& A, int n) {
  if (n < 1) throw DomainError("discretize_Fn: n must be >= 1");
  const auto table = hahn_table(n);
  const int modes = std::min<int>(n, static_cast<int>(A.coeffs.size()));
  Vec out = Vec::Zero(n);
  for (int m = 1; m <= modes; ++m) out += A.coeffs(m - 1) * table->row(m - 1).head(n).transpose();
  return out;
}

AngleState discretize_Fn(const SpectralCoeffs& theta, const SpectralCoeffs& theta_dot, int n) {
  return {n, discretize_Fn(theta, n), discretize_Fn(theta_dot, n)};
}

SpectralCoeffs continuize_Gn(const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  if (n < 1) throw SizeError("continuize_Gn: empty angle sequence");
  SpectralCoeffs out;
  out.basis = Basis::legendre_derived;
  out.n = n;
  out.coeffs = project_onto(theta, *hahn_table(n));
  return out;
}

AngleCoeffs continuize_Gn(const AngleState& angles) {
  return {continuize_Gn(angles.theta), continuize_Gn(angles.theta_dot)};
}

ChainState transfer_resolution(const ChainState& chain, int n_target) {
  if (n_target < 1) throw DomainError("transfer_resolution: n_target must be >= 1");
  const AngleCoeffs c = continuize_Gn(eta_to_theta(chain));
  return theta_to_eta(discretize_Fn(c.theta, c.theta_dot, n_target), chain.time);
}

NormPair angle_position_norms(const ChainState& chain) {
  if (chain.d != 2) throw UnsupportedDimension("angle norms need d = 2");
  const AngleState a = eta_to_theta(chain);
  const int n = chain.n;
  NormPair out;
  for (int m = 2; m <= 4 && m <= n; ++m) out.B += weighted_seminorm_sq(chain.eta, m, m, n, 1);
  for (int m = 1; m <= 3 && m < n; ++m) out.A += weighted_seminorm_sq(a.theta, m + 1, m, n, 1);
  return out;
}

}  // namespace whip

#include "whip/tension.hpp"

#include "whip/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace whip {

AlphaBeta alpha_beta_from_alpha(const Vec& alpha) {
  const int n = static_cast<int>(alpha.size()) + 1;
  AlphaBeta ab;
  ab.alpha = alpha;
  ab.beta.resize(n);
  ab.beta(n - 1) = 1.0;
  for (int i = n - 1; i >= 1; --i) {
    ab.beta(i - 1) = 2.0 - alpha(i - 1) * alpha(i - 1) / ab.beta(i);
  }
  return ab;
}

AlphaBeta compute_alpha_beta(const ChainState& chain) {
  // Cosines of the link angles. On the constraint manifold this is the raw
  // inner product; normalising keeps round-off in the lengths out of the
  // β recursion, which is only marginally stable at α = 1.
  const Mat l = chain.links().colwise().normalized();
  Vec alpha(chain.n - 1);
  for (int i = 1; i <= chain.n - 1; ++i) alpha(i - 1) = l.col(i).dot(l.col(i - 1));
  return alpha_beta_from_alpha(alpha);
}

double curvature_upsilon(const ChainState& chain) {
  const int n = chain.n;
  if (n < 2) return 0.0;
  const Mat dd = forward_diff(chain.eta, n, 2);  // column k-1 = ∇₊²η_k, k = 1..n-1
  double ups = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    ups = std::max(ups, std::pow(static_cast<double>(k) / n, 1.5) * dd.col(k - 1).squaredNorm());
  }
  return ups;
}

bool upsilon_admissible(double upsilon, int n) { return upsilon <= 0.4 * std::sqrt(static_cast<double>(n)); }

GreenMatrix green_matrix(const AlphaBeta& ab, int n) {
  if (ab.n() != n) throw SizeError("green_matrix: alpha/beta built for n=" + std::to_string(ab.n()));
  GreenMatrix g;
  g.G = kernels::green_parallel(ab);
  g.all_alpha_positive = (ab.alpha.array() > 0.0).all();
  return g;
}

GreenMatrix green_matrix(const ChainState& chain) {
  GreenMatrix g = green_matrix(compute_alpha_beta(chain), chain.n);
  const double ups = curvature_upsilon(chain);
  if (upsilon_admissible(ups, chain.n)) g.upsilon = ups;
  return g;
}

// ---------------------------------------------------------------------------

Vec tension_source(const ChainState& chain) {
  return chain.link_velocities().colwise().squaredNorm().transpose();
}

Vec solve_tension_system(const AlphaBeta& ab, const Vec& rhs) {
  const int n = ab.n();
  if (rhs.size() != n) throw SizeError("solve_tension_system: rhs must have n entries");
  // Thomas elimination, top to bottom. Diagonal 2 (1 in the last row),
  // off-diagonals -α. Pivots stay ≥ 1 because |α| ≤ 1.
  Vec cp(n), dp(n);
  for (int k = 1; k <= n; ++k) {
    const double diag = k < n ? 2.0 : 1.0;
    const double lower = k > 1 ? -ab.alpha(k - 2) : 0.0;
    const double upper = k < n ? -ab.alpha(k - 1) : 0.0;
    const double pivot = diag - (k > 1 ? lower * cp(k - 2) : 0.0);
    if (!(std::abs(pivot) > 1e-300)) throw NumericError("tension system: zero pivot in row " + std::to_string(k));
    cp(k - 1) = upper / pivot;
    dp(k - 1) = (rhs(k - 1) - (k > 1 ? lower * dp(k - 2) : 0.0)) / pivot;
  }
  Vec x(n);
  x(n - 1) = dp(n - 1);
  for (int k = n - 1; k >= 1; --k) x(k - 1) = dp(k - 1) - cp(k - 1) * x(k);
  return x;
}

namespace {

TensionSolution finish(Vec inner, TensionMethod method) {
  TensionSolution sol;
  sol.method = method;
  sol.sigma.resize(inner.size() + 1);
  sol.sigma(0) = 0.0;
  sol.sigma.tail(inner.size()) = inner;
  if (!sol.sigma.allFinite()) throw NumericError("tension: non-finite solution");
  sol.min_sigma = inner.minCoeff();
  sol.positivity = sol.min_sigma > 0.0;
  return sol;
}

}  // namespace

TensionSolution solve_tension(const ChainState& chain, TensionMethod method) {
  const int n = chain.n;
  const AlphaBeta ab = compute_alpha_beta(chain);
  const Vec w = tension_source(chain);
  if (method == TensionMethod::green) {
    const Mat G = kernels::green_parallel(ab);
    return finish(G * w / n, method);
  }
  return finish(solve_tension_system(ab, w / (static_cast<double>(n) * n)), method);
}

Vec solve_stage_tension(const ChainState& chain) {
  const int n = chain.n;
  const Mat l = chain.links();
  const Vec w = tension_source(chain) / (static_cast<double>(n) * n);
  // Rows of -⟨∇₊η_k, ∇₋∇₊(σ∇₊η)_k⟩/n² without assuming unit links.
  Vec diag(n), off(std::max(n - 1, 0));
  for (int k = 1; k <= n; ++k) diag(k - 1) = (k < n ? 2.0 : 1.0) * l.col(k - 1).squaredNorm();
  for (int k = 1; k < n; ++k) off(k - 1) = l.col(k).dot(l.col(k - 1));
  Vec cp(n), dp(n);
  for (int k = 1; k <= n; ++k) {
    const double lower = k > 1 ? -off(k - 2) : 0.0;
    const double pivot = diag(k - 1) - (k > 1 ? lower * cp(k - 2) : 0.0);
    if (!(std::abs(pivot) > 1e-300)) throw NumericError("stage tension: zero pivot in row " + std::to_string(k));
    cp(k - 1) = (k < n ? -off(k - 1) : 0.0) / pivot;
    dp(k - 1) = (w(k - 1) - (k > 1 ? lower * dp(k - 2) : 0.0)) / pivot;
  }
  Vec sigma(n + 1);
  sigma(0) = 0.0;
  sigma(n) = dp(n - 1);
  for (int k = n - 1; k >= 1; --k) sigma(k) = dp(k - 1) - cp(k - 1) * sigma(k + 1);
  return sigma;
}

double tension_residual(const ChainState& chain, const TensionSolution& sol) {
  const int n = chain.n;
  const AlphaBeta ab = compute_alpha_beta(chain);
  const Vec w = tension_source(chain);
  const double n2 = static_cast<double>(n) * n;
  double worst = 0.0;
  for (int k = 1; k <= n; ++k) {
    double row = (k < n ? 2.0 : 1.0) * sol.sigma(k);
    if (k > 1) row -= ab.alpha(k - 2) * sol.sigma(k - 1);
    if (k < n) row -= ab.alpha(k - 1) * sol.sigma(k + 1);
    worst = std::max(worst, std::abs(n2 * row - w(k - 1)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

bool BoundCertificate::all_pass() const {
  return diff_bound_ok && ratio_bound_ok && min_bound_ok && lower_bound_ok && corner_ok;
}

BoundCertificate certify_bounds(const GreenMatrix& green, const ChainState& chain) {
  const int n = chain.n;
  const Mat& G = green.G;
  if (G.rows() != n || G.cols() != n) throw SizeError("certify_bounds: Green matrix does not match chain");
  const AlphaBeta ab = compute_alpha_beta(chain);

  BoundCertificate cert;
  cert.n = n;
  cert.all_alpha_positive = (ab.alpha.array() > 0.0).all();
  cert.all_alpha_nonnegative = (ab.alpha.array() >= 0.0).all();
  cert.upper_bounds_apply = cert.all_alpha_nonnegative;
  cert.upsilon = curvature_upsilon(chain);
  cert.upsilon_admissible = upsilon_admissible(cert.upsilon, n);
  cert.min_ratio_lower = std::numeric_limits<double>::infinity();

  double min_F = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= n; ++j) {
    for (int k = 1; k <= n; ++k) {
      const double g = G(k - 1, j - 1);
      const double below = k > 1 ? G(k - 2, j - 1) : 0.0;
      cert.max_abs_diff = std::max(cert.max_abs_diff, std::abs(n * (g - below)));
      cert.max_ratio_upper = std::max(cert.max_ratio_upper, n * g / k);
      const double F = static_cast<double>(n) * n * g / (static_cast<double>(j) * k);
      cert.min_ratio_lower = std::min(cert.min_ratio_lower, F);
      min_F = std::min(min_F, F);
      cert.max_abs_over_min = std::max(cert.max_abs_over_min, std::abs(g) * n / std::min(j, k));
    }
  }

  cert.min_bound_ok = cert.max_abs_over_min <= 1.0 + kBoundSlack;
  if (cert.upper_bounds_apply) {
    cert.diff_bound_ok = cert.max_abs_diff <= 1.0 + kBoundSlack;
    cert.ratio_bound_ok = cert.max_ratio_upper <= 1.0 + kBoundSlack;
  }
  if (cert.upsilon_admissible) {
    cert.lower_bound_ok = cert.min_ratio_lower >= std::exp(-2.0 * cert.upsilon) - kBoundSlack;
  }
  if (cert.all_alpha_nonnegative) {
    cert.corner_checked = true;
    double value = 1.0 / ab.beta(0);
    for (int m = 1; m <= n - 1; ++m) value *= ab.alpha(m - 1) / ab.beta(m);
    cert.corner_value = value;
    cert.corner_min = min_F;
    const double F1n = static_cast<double>(n) * G(0, n - 1);
    const double scale = std::max(1.0, std::abs(F1n));
    cert.corner_ok = std::abs(min_F - F1n) <= kBoundSlack * scale && std::abs(F1n - value) <= kBoundSlack * scale;
  }
  return cert;
}

// ---------------------------------------------------------------------------

namespace {

// (∇₋∇₊V)_k for k = 1..n given V_0..V_n, with V_0 supplied by the caller and
// V_{n+1} = V_n from the reflections through the fixed end.
Mat second_difference_closed(const Mat& V, int n) {
  Mat out(V.rows(), n);
  const double n2 = static_cast<double>(n) * n;
  for (int k = 1; k <= n; ++k) {
    const auto next = k < n ? V.col(k + 1) : V.col(n);
    out.col(k - 1) = n2 * (next - 2.0 * V.col(k) + V.col(k - 1));
  }
  return out;
}

}  // namespace

Vec solve_sigma_dot(const ChainState& chain, const TensionSolution& sigma) {
  const int n = chain.n;
  if (sigma.sigma.size() != n + 1) throw DependencyError("solve_sigma_dot: tension does not match chain");
  const Mat l = chain.links();
  const Mat lv = chain.link_velocities();

  // V_k = σ_k ∇₊η_k and W_k = σ_k ∇₊η̇_k for k = 0..n; σ_0 = 0 kills k = 0.
  Mat V = Mat::Zero(chain.d, n + 1);
  Mat W = Mat::Zero(chain.d, n + 1);
  for (int k = 1; k <= n; ++k) {
    V.col(k) = sigma.sigma(k) * l.col(k - 1);
    W.col(k) = sigma.sigma(k) * lv.col(k - 1);
  }
  const Mat DV = second_difference_closed(V, n);
  const Mat DW = second_difference_closed(W, n);

  const double n2 = static_cast<double>(n) * n;
  Vec rhs(n);
  for (int k = 1; k <= n; ++k) {
    rhs(k - 1) = (3.0 * lv.col(k - 1).dot(DV.col(k - 1)) + l.col(k - 1).dot(DW.col(k - 1))) / n2;
  }
  Vec out(n + 1);
  out(0) = 0.0;
  out.tail(n) = solve_tension_system(compute_alpha_beta(chain), rhs);
  if (!out.allFinite()) throw NumericError("sigma_dot: non-finite solution");
  return out;
}

TensionDiagnostics diagnostics_abc(const ChainState& chain, const TensionSolution& sigma, const Vec& sigma_dot) {
  const int n = chain.n;
  if (sigma.sigma.size() != n + 1 || sigma_dot.size() != n + 1) {
    throw SizeError("diagnostics_abc: tension arrays must hold n+1 entries");
  }
  TensionDiagnostics out;
  bool nonpositive = false;
  for (int k = 1; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    const double sk = sigma.sigma(k);
    out.a = std::max(out.a, std::abs(n * (sk - sigma.sigma(k - 1))));
    out.c = std::max(out.c, std::abs(n * (sigma_dot(k) - sigma_dot(k - 1))));
    if (sk <= 0.0) {
      nonpositive = true;
    } else {
      out.b = std::max(out.b, s / sk);
    }
    out.max_sigma_over_s = std::max(out.max_sigma_over_s, sk / s);
    out.max_sigma_dot_over_s = std::max(out.max_sigma_dot_over_s, std::abs(sigma_dot(k)) / s);
  }
  if (nonpositive) out.b = std::numeric_limits<double>::infinity();
  const double slack = 1e-12;
  out.consequences_hold = out.max_sigma_over_s <= out.a * (1.0 + slack) + slack &&
                          out.max_sigma_dot_over_s <= out.c * (1.0 + slack) + slack;
  return out;
}

std::vector<double> tension_sobolev_norms(const Vec& sigma, int m_max) {
  if (m_max < 0) throw DomainError("tension_sobolev_norms: m_max must be >= 0");
  const int n = static_cast<int>(sigma.size()) - 1;
  if (n < 1) throw SizeError("tension_sobolev_norms: need sigma_0..sigma_n");
  std::vector<double> d(m_max, 0.0);
  double running = 0.0;
  for (int l = 0; l < m_max; ++l) {
    const int order = l + 2;
    // Sum over k = 0..n-order; empty when the chain is too short.
    if (sigma.size() > order) running += weighted_seminorm_sq(sigma, l + 1.5, order, n, 0);
    d[l] = running;
  }
  return d;
}

EnergyReport energy_report(const ChainState& chain, const TensionSolution& sigma, const Vec& sigma_dot, int m_max) {
  EnergyReport r;
  r.time = chain.time;
  r.e = discrete_energy(chain, m_max);
  r.e_tilde = sigma_weighted_energy(chain, even_extend(sigma.sigma), m_max);
  r.u0 = kinetic_u0(chain);
  r.v0 = potential_v0(chain);
  const TensionDiagnostics diag = diagnostics_abc(chain, sigma, sigma_dot);
  r.a = diag.a;
  r.b = diag.b;
  r.c = diag.c;
  r.d = tension_sobolev_norms(sigma.sigma, m_max);
  const ConstraintDrift drift = chain.drift();
  r.constraint_drift = drift.length;
  r.orthogonality_drift = drift.orthogonality;
  return r;
}

}  // namespace whip

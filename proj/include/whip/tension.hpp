#pragma once

// Link tensions of the chain.
//
// Differentiating the length constraint |∇₊η_k|² = 1 twice and substituting
// η̈ = ∇₋(σ∇₊η) gives, after dividing by n², the tridiagonal system
//
//     2σ_k - α_{k-1}σ_{k-1} - α_kσ_{k+1} = |∇₊η̇_k|² / n²,   1 ≤ k < n
//      σ_n - α_{n-1}σ_{n-1}              = |∇₊η̇_n|² / n²
//
// with σ_0 = 0 and α_i = ⟨∇₊η_{i+1}, ∇₊η_i⟩ (taken as the cosine of the
// angle between the links, equal on the constraint manifold). The last row uses the odd
// extension, under which ∇₊η_{n+1} = ∇₊η_n. Its inverse is n times the
// Green matrix G, so σ_k = (1/n) Σ_j G_kj |∇₊η̇_j|².

#include "whip/core.hpp"

#include <optional>

namespace whip {

// alpha(i-1) = α_i for i = 1..n-1, beta(i-1) = β_i for i = 1..n.
struct AlphaBeta {
  Vec alpha;
  Vec beta;

  int n() const { return static_cast<int>(beta.size()); }
};

AlphaBeta compute_alpha_beta(const ChainState& chain);

// β_n = 1, β_i = 2 - α_i² / β_{i+1}. `alpha` holds α_1..α_{n-1}.
AlphaBeta alpha_beta_from_alpha(const Vec& alpha);

struct GreenMatrix {
  Mat G;  // G(k-1, j-1) = G_kj
  bool all_alpha_positive = false;
  std::optional<double> upsilon;  // set when admissible (≤ 2√n/5)
};

// Smallest υ with (k/n)^{3/2} |∇₊²η_k|² ≤ υ for 1 ≤ k ≤ n-1. Zero for n = 1.
double curvature_upsilon(const ChainState& chain);
bool upsilon_admissible(double upsilon, int n);

// Builds G with the parallel kernel. The chain overload also fills upsilon.
GreenMatrix green_matrix(const AlphaBeta& ab, int n);
GreenMatrix green_matrix(const ChainState& chain);

enum class TensionMethod { green, direct };

struct TensionSolution {
  Vec sigma;  // sigma_0..sigma_n, sigma(0) = 0
  double min_sigma = 0.0;
  bool positivity = false;
  TensionMethod method = TensionMethod::direct;
};

// w_k = |∇₊η̇_k|², k = 1..n.
Vec tension_source(const ChainState& chain);

TensionSolution solve_tension(const ChainState& chain, TensionMethod method = TensionMethod::direct);

// Solves the tension operator of `ab` against an arbitrary right-hand side
// (already divided by n²). Returns x_1..x_n.
Vec solve_tension_system(const AlphaBeta& ab, const Vec& rhs);

// Tension for a state whose links are not exactly unit length (integrator
// stages): the diagonal carries |∇₊η_k|² instead of 1, off-diagonals the raw
// inner products. Agrees with solve_tension on the constraint manifold and
// keeps |∇₊η_k|² free of second-derivative forcing off it. Returns σ_0..σ_n.
Vec solve_stage_tension(const ChainState& chain);

// Max over k of |row_k(Aσ) - w_k/n²|, scaled back by n².
double tension_residual(const ChainState& chain, const TensionSolution& sol);

struct BoundCertificate {
  int n = 0;
  double max_abs_diff = 0.0;        // max |n(G_kj - G_{k-1,j})|, G_0j = 0
  double max_ratio_upper = 0.0;     // max nG_kj / k
  double min_ratio_lower = 0.0;     // min n²G_kj / (jk)
  double max_abs_over_min = 0.0;    // max |G_kj| / (min(j,k)/n)
  double upsilon = 0.0;
  bool upsilon_admissible = false;
  bool all_alpha_positive = false;
  bool all_alpha_nonnegative = false;
  bool upper_bounds_apply = false;  // all α ≥ 0
  bool diff_bound_ok = true;
  bool ratio_bound_ok = true;
  bool min_bound_ok = true;         // |G_kj| ≤ min(j,k)/n, always applies
  bool lower_bound_ok = true;       // only meaningful when upsilon_admissible
  bool corner_checked = false;
  bool corner_ok = true;
  double corner_min = 0.0;          // min_{j,k} F_kj
  double corner_value = 0.0;        // F_{1n} from the product formula

  bool all_pass() const;
};

// Slack used by certify_bounds when comparing against the exact bounds;
// attained bounds (straight chain) would otherwise flip on round-off.
inline constexpr double kBoundSlack = 1e-12;

BoundCertificate certify_bounds(const GreenMatrix& green, const ChainState& chain);

// σ̇_0..σ̇_n: same operator as σ with source
// 3⟨∇₊η̇, ∇₋∇₊(σ∇₊η)⟩ + ⟨∇₊η, ∇₋∇₊(σ∇₊η̇)⟩ (divided by n²), σ̇_0 = 0.
Vec solve_sigma_dot(const ChainState& chain, const TensionSolution& sigma);

struct TensionDiagnostics {
  double a = 0.0;  // max |∇₋σ|
  double b = 0.0;  // max s_k / σ_k, +inf if some σ_k ≤ 0
  double c = 0.0;  // max |∇₋σ̇|
  double max_sigma_over_s = 0.0;
  double max_sigma_dot_over_s = 0.0;
  bool consequences_hold = true;  // the two ratios stay below a and c
};

TensionDiagnostics diagnostics_abc(const ChainState& chain, const TensionSolution& sigma, const Vec& sigma_dot);

// d_1..d_{m_max}, d_m = Σ_{ℓ<m} ‖σ‖²_{ℓ+3/2, ℓ+2} over σ_0..σ_n.
std::vector<double> tension_sobolev_norms(const Vec& sigma, int m_max);

// Full report at one instant: energies, diagnostics and drift.
EnergyReport energy_report(const ChainState& chain, const TensionSolution& sigma, const Vec& sigma_dot, int m_max = 3);

}  // namespace whip

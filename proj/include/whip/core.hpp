#pragma once

// Difference calculus, rising-factorial weights, weighted seminorms and the
// discrete energies of an n-link chain with one end fixed at the origin.
//
// Index conventions follow the chain: particles are eta_1..eta_{n+1} with
// eta_{n+1} = 0, tensions are sigma_0..sigma_n with sigma_0 = 0. Scalar
// sequences are Eigen vectors, R^d-valued sequences are d x N matrices with
// one column per index.

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace whip {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DependencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Difference operators. All of them shorten the sequence; nothing is padded.
//
// forward_diff: out[i] = n (f[i+1] - f[i]) is (∇₊f) at the index of f[i].
// backward_diff: same numbers, but out[i] is (∇₋f) at the index of f[i+1].
// shift: out[i] = f[i+j], i.e. (E^j f) at the index of f[i].

Vec forward_diff(const Vec& f, int n);
Mat forward_diff(const Mat& f, int n);
Vec forward_diff(const Vec& f, int n, int order);
Mat forward_diff(const Mat& f, int n, int order);

Vec backward_diff(const Vec& f, int n);
Mat backward_diff(const Mat& f, int n);

Vec shift(const Vec& f, int j);
Mat shift(const Mat& f, int j);

// ---------------------------------------------------------------------------
// Rising-factorial weight s_k^{(r)} = Γ(k+r) / (n^r Γ(k)).
//
// Integer r >= 0 uses the exact product k(k+1)...(k+r-1)/n^r, other r go
// through lgamma. k = 0 is accepted with the Γ(0) = ∞ convention (weight 0
// unless r = 0), which is what the sigma seminorms starting at k = 0 need.
double rising_weight(int k, double r, int n);

struct WeightedSeminorm {
  double r = 0.0;
  int m = 0;
  double squared = 0.0;

  double value() const;
};

// (1/n) Σ_k s_k^{(r)} |∇₊^m f_k|² over every k the data supports.
// `first_index` labels f[0]: pass 1 for f_1..f_n (sum to n-m), 1 with
// f_1..f_{n+1} for the eta convention (sum to n-m+1), 0 with sigma_0..sigma_n
// for the sigma convention.
double weighted_seminorm_sq(const Vec& f, double r, int m, int n, int first_index = 1);
double weighted_seminorm_sq(const Mat& f, double r, int m, int n, int first_index = 1);
WeightedSeminorm weighted_seminorm(const Mat& f, double r, int m, int n, int first_index = 1);

// max_k s_k^{(r)} |∇₊^m f_k|² over the same range.
double weighted_supnorm_sq(const Vec& f, double r, int m, int n, int first_index = 1);
double weighted_supnorm_sq(const Mat& f, double r, int m, int n, int first_index = 1);

// ---------------------------------------------------------------------------
// Chain state.

struct ConstraintTolerance {
  double length = 1e-10;
  double orthogonality = 1e-8;
};

struct ConstraintDrift {
  double length = 0.0;         // max_k | |∇₊η_k| - 1 |
  double orthogonality = 0.0;  // max_k |⟨∇₊η_k, ∇₊η̇_k⟩|
};

struct ChainState {
  int n = 0;
  int d = 0;
  Mat eta;      // d x (n+1); column k-1 holds eta_k, column n is the fixed end
  Mat eta_dot;  // same layout
  double time = 0.0;

  // Rebuilds positions and velocities from link vectors ∇₊η_k and ∇₊η̇_k
  // (d x n each) by summing from the fixed end: eta_{n+1} = 0 and
  // eta_k = eta_{k+1} - ∇₊η_k / n.
  static ChainState from_links(const Mat& links, const Mat& link_velocities, double time = 0.0);

  Mat links() const;            // ∇₊η_k, k = 1..n
  Mat link_velocities() const;  // ∇₊η̇_k, k = 1..n

  ConstraintDrift drift() const;

  // Throws DomainError when a constraint is violated beyond tolerance or the
  // fixed end is not exactly at rest at the origin.
  void validate(const ConstraintTolerance& tol = {}) const;
};

// Odd reflection of eta (and eta_dot) through the fixed end, even reflection
// of sigma. Columns of eta_ext hold eta_1..eta_{2n+1}; sigma_ext holds
// sigma_0..sigma_{2n+1}.
struct ExtendedChain {
  ChainState base;
  Mat eta_ext;
  Mat eta_dot_ext;
  std::optional<Vec> sigma_ext;
};

ExtendedChain odd_extend(const ChainState& chain);
ExtendedChain odd_extend(const ChainState& chain, const Vec& sigma);

// sigma_0..sigma_n  ->  sigma_0..sigma_{2n+1} with sigma_k = sigma_{2n+1-k}.
Vec even_extend(const Vec& sigma);

// ---------------------------------------------------------------------------
// Energies.

// u0 = (1/n) Σ |η̇_k|², v0 = (1/n) Σ s_k |∇₊η_k|².
double kinetic_u0(const ChainState& chain);
double potential_v0(const ChainState& chain);

// e_0..e_{m_max}; differences beyond the physical range use the odd extension.
std::vector<double> discrete_energy(const ChainState& chain, int m_max);

// ẽ_0..ẽ_{m_max} with weights σ_k^{(r)} = σ_k σ_{k+1} ... σ_{k+r-1} read from
// `sigma_ext` (entry i is sigma_i; it must reach index 2n). Use even_extend()
// to build it from a tension vector.
std::vector<double> sigma_weighted_energy(const ChainState& chain, const Vec& sigma_ext, int m_max);

// Everything reported about one instant of a trajectory.
struct EnergyReport {
  double time = 0.0;
  std::vector<double> e;        // e_0..e_M
  std::vector<double> e_tilde;  // ẽ_0..ẽ_M
  double u0 = 0.0;
  double v0 = 0.0;
  double a = 0.0;
  double b = 0.0;  // +inf when some sigma_k <= 0
  double c = 0.0;
  std::vector<double> d;  // d_1..d_{M}
  double constraint_drift = 0.0;
  double orthogonality_drift = 0.0;
};

}  // namespace whip

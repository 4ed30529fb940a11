#pragma once

// Angle representation of planar chains and the orthogonal bases that move
// angle functions between resolutions.
//
// Inner products on even functions of [0,2] / even sequences on 1..2n:
//   continuous  ⟨⟨f,g⟩⟩_{ρ,j} = ∫_0^1 ρ(s)^{j+1} f^{(j)} g^{(j)} ds,  ρ = s(2-s)
//   discrete    ⟨⟨f,g⟩⟩_{ρ,j} = (1/n) Σ_{k=1}^{n-⌊j/2⌋} ρ_k^{(j+1)} ∇₊^j f_k ∇₊^j g_k,
//               ρ_k = k(2n+1-k)/n²,  ρ_k^{(j+1)} = ρ_k ρ_{k+1} ... ρ_{k+j}
// Q_m(s) = K_m P'_{2m-1}(1-s) and the Hahn-derived q_m(k/n) are orthogonal in
// every one of these, with ⟨⟨Q_m,Q_m⟩⟩_{ρ,j} = ⟨⟨q_m,q_m⟩⟩_{ρ,j} = r_mj.

#include "whip/core.hpp"

#include <functional>
#include <memory>

namespace whip {

class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AngleState {
  int n = 0;
  Vec theta;      // θ_1..θ_n, link k points along (cos θ_k, sin θ_k)
  Vec theta_dot;  // θ̇_1..θ̇_n
};

enum class Basis { hahn_derived, legendre_derived };

struct SpectralCoeffs {
  Vec coeffs;  // coefficient of mode m at index m-1
  Basis basis = Basis::legendre_derived;
  int n = 0;   // source resolution for discrete coefficients, 0 otherwise
};

// ---------------------------------------------------------------------------
// Angles.

// Unwrapped so that |θ_{k+1} - θ_k| ≤ π; an exact jump of ±π is taken as +π.
AngleState eta_to_theta(const ChainState& chain);
ChainState theta_to_eta(const AngleState& angles, double time = 0.0);

// θ_1..θ_n  ->  θ_1..θ_{2n} with θ_{2n+1-k} = θ_k.
Vec even_extend_angles(const Vec& theta);

// ---------------------------------------------------------------------------
// Bases.

// (2m+j)! / ((2m-j-2)! 2m (2m-1)), zero when 2m-j-2 < 0.
double r_mj(int m, int j);

// Q_m^{(deriv)}(s) at each point of s (s in [0,2]).
Vec basis_Q(int m, const Vec& s, int deriv = 0);

// q_m(k/n) for k = 1..2n.
Vec basis_q(int m, int n);

// All q_1..q_n at resolution n: row m-1, column k-1. Cached per n.
std::shared_ptr<const Mat> hahn_table(int n);

// ---------------------------------------------------------------------------
// Inner products and norms.

double discrete_inner(const Vec& f_ext, const Vec& g_ext, int j, int n);  // sequences on 1..2n
double discrete_norm_sq(const Vec& theta, int j);                        // θ_1..θ_n, extended evenly

// Gauss–Legendre on [0,1].
struct Quadrature {
  Vec nodes;
  Vec weights;
};
Quadrature gauss_legendre01(int points);

// ∫_0^1 ρ^{j+1} |f^{(j)}|² given f^{(j)} as a callable.
double continuous_norm_sq(const std::function<double(double)>& f_deriv_j, int j, int points = 256);

// ⟨⟨Σ A_m Q_m⟩⟩_{ρ,j} by quadrature of the expanded function.
double continuous_norm_sq(const SpectralCoeffs& A, int j, int points = 0);

double evaluate_continuous(const SpectralCoeffs& A, double s, int deriv = 0);

// ---------------------------------------------------------------------------
// Maps.

// A_m = ⟨⟨θ, Q_m⟩⟩_{ρ,0} for m = 1..modes.
SpectralCoeffs project_continuous(const std::function<double(double)>& theta, int modes, int points = 512);

// F_n: keep the first n coefficients and evaluate Σ A_m q_m(k/n), k = 1..n.
Vec discretize_Fn(const SpectralCoeffs& A, int n);
AngleState discretize_Fn(const SpectralCoeffs& theta, const SpectralCoeffs& theta_dot, int n);

// G_n: a_m = ⟨⟨θ, q_m⟩⟩_{ρ,0} for m = 1..n.
SpectralCoeffs continuize_Gn(const Vec& theta);

struct AngleCoeffs {
  SpectralCoeffs theta;
  SpectralCoeffs theta_dot;
};
AngleCoeffs continuize_Gn(const AngleState& angles);

// Chain at n_target with the same angle and angular-velocity expansions.
ChainState transfer_resolution(const ChainState& chain, int n_target);

// Discrete third-order norms of the chain and of its angles, the two sides
// of the η/θ norm equivalence:
//   B = Σ_{m=2}^{4} (1/n) Σ_{k=1}^{n-m+1} s_k^{(m)} |∇₊^m η_k|²
//   A = Σ_{m=1}^{3} (1/n) Σ_{k=1}^{n-m}   s_k^{(m+1)} |∇₊^m θ_k|²
struct NormPair {
  double A = 0.0;
  double B = 0.0;
};
NormPair angle_position_norms(const ChainState& chain);

}  // namespace whip

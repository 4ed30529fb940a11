#pragma once

// Time integration of the chain: η̈ = ∇₋(σ∇₊η) with σ re-solved from the
// constraint system at every stage, followed by an optional projection back
// onto the constraint manifold once per step.

#include "whip/core.hpp"
#include "whip/tension.hpp"

#include <limits>
#include <string>
#include <vector>

namespace whip {

enum class Scheme { rk4, heun };

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4;
  double cfl = 0.5;
  double dt_max = 1e-2;
  double dt_min = 1e-10;
  bool project = true;
  bool halt_on_negative_tension = true;
  double t_end = 1.0;
  int report_stride = 1;
  int m_max = 3;  // highest energy index reported
  // Stop with blowup_suspected once max|∇₊²η| reaches this fraction of its
  // ceiling 2n (a link folded back onto its neighbour). 0 disables.
  double blowup_curvature_fraction = 0.0;

  void validate() const;  // throws DomainError
};

// η̈_k = n²[σ_k(η_{k+1} - η_k) - σ_{k-1}(η_k - η_{k-1})], η̈_{n+1} = 0.
Mat acceleration(const ChainState& chain, const TensionSolution& sigma);

// clamp(cfl / (n √max σ + 1e-12), dt_min, dt_max). Negative tensions count
// as zero wave speed.
double adaptive_dt(const ChainState& chain, const TensionSolution& sigma, const IntegratorConfig& cfg);

// The CFL value before clamping; used to detect underflow.
double raw_cfl_dt(const ChainState& chain, const TensionSolution& sigma, const IntegratorConfig& cfg);

struct ProjectionMagnitude {
  double length = 0.0;      // max | |∇₊η_k| - 1 | removed
  double orthogonal = 0.0;  // max |⟨∇₊η̇_k, û_k⟩| removed
};

// Renormalises links, strips the radial part of each link velocity, then
// rebuilds positions and velocities from the fixed end.
ProjectionMagnitude project(ChainState& chain);

class StepUnderflow : public NumericError {
 public:
  using NumericError::NumericError;
};

// One step of fixed size (dt may be negative). No projection unless asked.
ChainState step_fixed(const ChainState& chain, double dt, Scheme scheme, bool project_after = false,
                      ProjectionMagnitude* removed = nullptr);

// One step with the adaptive size; throws StepUnderflow when the CFL size
// falls below dt_min, NumericError on non-finite output.
ChainState step(const ChainState& chain, const IntegratorConfig& cfg, ProjectionMagnitude* removed = nullptr);

enum class Termination { t_end_reached, negative_tension, blowup_suspected, dt_underflow };

std::string to_string(Termination t);

// Everything known about one reported instant.
struct Snapshot {
  ChainState state;
  TensionSolution tension;
  Vec sigma_dot;
  EnergyReport report;
  double max_link_speed = 0.0;  // max_k |∇₊η̇_k|
  double max_curvature = 0.0;   // max_k |∇₊²η_k|, k ≤ n-1
  ProjectionMagnitude projection;  // removed by the step that produced it
  // Monitored ratios; their constants are never asserted.
  double ratio_a = 0.0;         // a / e2
  double ratio_c = 0.0;         // c / (e2^{3/2} e3^{1/2})
  double ratio_d = 0.0;         // d1 / e3^4
  double gronwall = 0.0;        // (ẽ3(t+h) - ẽ3(t)) / (h e3(t)^7), one-sided
};

Snapshot make_snapshot(const ChainState& chain, int m_max = 3);

struct Trajectory {
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::t_end_reached;
  long steps = 0;
  double max_projection_length = 0.0;
  double max_projection_orthogonal = 0.0;
};

Trajectory run(const ChainState& initial, const IntegratorConfig& cfg);

// max_k |∇₊η̇_k| and max_{k≤n-1} |∇₊²η_k|.
double max_link_speed(const ChainState& chain);
double max_curvature(const ChainState& chain);

}  // namespace whip

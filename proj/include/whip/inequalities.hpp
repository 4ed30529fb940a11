#pragma once

// Both sides of the weighted-norm inequalities used throughout the energy
// estimates, evaluated on concrete sequences so they can be checked in bulk.
//
// Sequences f here are f_1..f_n (entry 0 is f_1). ‖f‖²_{r,m} and ⟦f⟧²_{r,m}
// are the squared weighted seminorm and supremum from core.hpp.

#include "whip/core.hpp"

namespace whip {

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;

  // lhs ≤ rhs up to a relative slack; the pointwise A2 bound is attained by
  // some sequences and would otherwise fail on round-off.
  bool holds(double rel_slack = 1e-12) const;
};

// Γ(p+q+1) / (Γ(p+1) Γ(q+1)).
double binomial_real(double p, double q);

// s_i^{(r)}|f_i|² ≤ s_n^{(r)}|f_n|² + (1/r)‖f‖²_{r+1,1}; worst i reported.
InequalityCheck pointwise_weighted_bound(const Vec& f, double r, int n);

// ‖f‖²_{r-1,0} ≤ (4/r²)‖f‖²_{r+1,1} + (2/r) s_n^{(r)}|f_n|².
InequalityCheck lower_order_bound(const Vec& f, double r, int n);

// s_n^{(r)}|f_n|² ≤ (2r²+4r+1)/(r(r+1)) ‖f‖²_{r+1,1} + 4(r+1)‖f‖²_{r,0}.
InequalityCheck boundary_bound(const Vec& f, double r, int n);

// s_k^{(p)} ≤ s_k^{(p+q)}/s_k^{(q)} and s_k^{(p+q)}/s_k^{(q)} ≤ C(p,q) s_k^{(p)}.
InequalityCheck weight_ratio_lower(double p, double q, int k, int n);
InequalityCheck weight_ratio_upper(double p, double q, int k, int n);

// s_k^{(p)} ≤ s_{k+j}^{(p)} and s_{k+j}^{(p)} ≤ C(j,p) s_k^{(p)}.
InequalityCheck weight_shift_lower(double p, int j, int k, int n);
InequalityCheck weight_shift_upper(double p, int j, int k, int n);

// ‖fg‖²_{p+q,0} ≤ C(p,q) ⟦f⟧²_{p,0} ‖g‖²_{q,0}.
InequalityCheck product_bound(const Vec& f, const Vec& g, double p, double q, int n);

}  // namespace whip

#pragma once

// Two builds of the discrete Green matrix from the α/β sequences.
//
// green_reference evaluates G_kj = (1/n) Σ_{i≤min(j,k)} p_ij p_ik / β_i
// term by term (O(n³)) and is kept as the oracle. green_parallel uses the
// factorisation G_kj = p_kj G_kk for k ≤ j together with
//     n G_kk = (α_{k-1}/β_k)² n G_{k-1,k-1} + 1/β_k,
// which is O(n²) and parallel over rows.

#include "whip/tension.hpp"

namespace whip::kernels {

Mat green_reference(const AlphaBeta& ab);
Mat green_parallel(const AlphaBeta& ab, int threads = 0);  // 0: OpenMP default

}  // namespace whip::kernels

#pragma once

// Random chains and small brute-force oracles shared by the unit and
// acceptance tests. The oracles here deliberately avoid the library's own
// difference and weight helpers.

#include "whip/core.hpp"

#include <Eigen/LU>

#include <cmath>
#include <random>

namespace whip::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Planar chain whose link angles turn by at most `max_turn` per link, with
// link angular velocities of size up to `omega`.
inline ChainState random_planar_chain(Rng& rng, int n, double max_turn, double omega = 1.0) {
  Mat links(2, n), vel(2, n);
  double theta = uniform(rng, -M_PI, M_PI);
  for (int k = 0; k < n; ++k) {
    if (k > 0) theta += uniform(rng, -max_turn, max_turn);
    const double w = uniform(rng, -omega, omega);
    links.col(k) << std::cos(theta), std::sin(theta);
    vel.col(k) << -std::sin(theta) * w, std::cos(theta) * w;
  }
  return ChainState::from_links(links, vel);
}

// Chain in R^d with Gaussian link directions (any angles, including obtuse)
// and tangent link velocities.
inline ChainState random_chain(Rng& rng, int n, int d, double omega = 1.0) {
  Mat links(d, n), vel(d, n);
  for (int k = 0; k < n; ++k) {
    Vec u(d), v(d);
    for (int i = 0; i < d; ++i) {
      u(i) = normal(rng);
      v(i) = omega * normal(rng);
    }
    u.normalize();
    v -= v.dot(u) * u;
    links.col(k) = u;
    vel.col(k) = v;
  }
  return ChainState::from_links(links, vel);
}

inline ChainState straight_chain(int n, double omega = 0.0) {
  Mat links(2, n), vel(2, n);
  for (int k = 0; k < n; ++k) {
    links.col(k) << 1.0, 0.0;
    vel.col(k) << 0.0, omega;
  }
  return ChainState::from_links(links, vel);
}

inline double binom(int a, int b) { return std::tgamma(a + 1.0) / (std::tgamma(b + 1.0) * std::tgamma(a - b + 1.0)); }

// (∇₊^ℓ f)_k = n^ℓ Σ_j (-1)^{ℓ-j} C(ℓ,j) f_{k+j}, column-indexed from 0.
inline Eigen::VectorXd brute_diff(const Mat& f, int col, int order, int n) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.rows());
  for (int j = 0; j <= order; ++j) {
    acc += ((order - j) % 2 ? -1.0 : 1.0) * binom(order, j) * f.col(col + j);
  }
  return std::pow(static_cast<double>(n), order) * acc;
}

inline double brute_weight(int k, int r, int n) {
  double w = 1.0;
  for (int i = 0; i < r; ++i) w *= static_cast<double>(k + i) / n;
  return w;
}

// Matrix of σ ↦ ⟨∇₊η_k, ∇₋∇₊(σ∇₊η)_k⟩ assembled column by column from the
// positions alone, using V_0 = 0 and V_{n+1} = V_n.
inline Mat raw_operator(const ChainState& c) {
  const int n = c.n;
  Mat l(c.d, n);
  for (int k = 0; k < n; ++k) l.col(k) = n * (c.eta.col(k + 1) - c.eta.col(k));
  Mat M(n, n);
  for (int j = 1; j <= n; ++j) {
    Mat V = Mat::Zero(c.d, n + 2);
    V.col(j) = l.col(j - 1);
    V.col(n + 1) = V.col(n);
    for (int k = 1; k <= n; ++k) {
      M(k - 1, j - 1) = double(n) * n * l.col(k - 1).dot(V.col(k + 1) - 2 * V.col(k) + V.col(k - 1));
    }
  }
  return M;
}

inline Vec brute_sigma(const ChainState& c) {
  Vec w(c.n);
  for (int k = 0; k < c.n; ++k) w(k) = (double(c.n) * (c.eta_dot.col(k + 1) - c.eta_dot.col(k))).squaredNorm();
  return raw_operator(c).partialPivLu().solve(-w);
}

}  // namespace whip::testing

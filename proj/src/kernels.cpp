#include "whip/kernels.hpp"

#include <omp.h>

namespace whip::kernels {

namespace {

// ratio(m-1) = α_m / β_{m+1}, m = 1..n-1.
Vec link_ratios(const AlphaBeta& ab) {
  const int n = ab.n();
  Vec ratio(std::max(n - 1, 0));
  for (int m = 1; m <= n - 1; ++m) ratio(m - 1) = ab.alpha(m - 1) / ab.beta(m);
  return ratio;
}

}  // namespace

Mat green_reference(const AlphaBeta& ab) {
  const int n = ab.n();
  const Vec ratio = link_ratios(ab);

  // p(i-1, j-1) = p_ij = Π_{m=i}^{j-1} α_m/β_{m+1} for j ≥ i, empty product 1.
  Mat p = Mat::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    double prod = 1.0;
    p(i - 1, i - 1) = 1.0;
    for (int j = i + 1; j <= n; ++j) {
      prod *= ratio(j - 2);
      p(i - 1, j - 1) = prod;
    }
  }

  Mat G(n, n);
  for (int k = 1; k <= n; ++k) {
    for (int j = 1; j <= n; ++j) {
      double acc = 0.0;
      for (int i = 1; i <= std::min(j, k); ++i) acc += p(i - 1, j - 1) * p(i - 1, k - 1) / ab.beta(i - 1);
      G(k - 1, j - 1) = acc / n;
    }
  }
  return G;
}

Mat green_parallel(const AlphaBeta& ab, int threads) {
  const int n = ab.n();
  const Vec ratio = link_ratios(ab);

  // diag(k-1) = n G_kk
  Vec diag(n);
  double prev = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double r = k > 1 ? ratio(k - 2) : 0.0;
    prev = r * r * prev + 1.0 / ab.beta(k - 1);
    diag(k - 1) = prev;
  }

  Mat G(n, n);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
  for (int k = 1; k <= n; ++k) {
    double g = diag(k - 1) / n;
    G(k - 1, k - 1) = g;
    for (int j = k + 1; j <= n; ++j) {
      g *= ratio(j - 2);
      G(k - 1, j - 1) = g;
      G(j - 1, k - 1) = g;
    }
  }
  return G;
}

}  // namespace whip::kernels

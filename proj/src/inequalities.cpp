#include "whip/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace whip {

bool InequalityCheck::holds(double rel_slack) const {
  return lhs <= rhs + rel_slack * std::max(std::abs(rhs), std::abs(lhs));
}

double binomial_real(double p, double q) {
  return std::exp(std::lgamma(p + q + 1.0) - std::lgamma(p + 1.0) - std::lgamma(q + 1.0));
}

namespace {

void require(const Vec& f, int n) {
  if (f.size() != n) throw SizeError("inequality: sequence must hold f_1..f_n");
  if (n < 2) throw SizeError("inequality: need n >= 2");
}

double tail_term(const Vec& f, double r, int n) { return rising_weight(n, r, n) * f(n - 1) * f(n - 1); }

}  // namespace

InequalityCheck pointwise_weighted_bound(const Vec& f, double r, int n) {
  require(f, n);
  const double rhs = tail_term(f, r, n) + weighted_seminorm_sq(f, r + 1.0, 1, n) / r;
  InequalityCheck worst{-std::numeric_limits<double>::infinity(), rhs};
  for (int i = 1; i <= n; ++i) worst.lhs = std::max(worst.lhs, rising_weight(i, r, n) * f(i - 1) * f(i - 1));
  return worst;
}

InequalityCheck lower_order_bound(const Vec& f, double r, int n) {
  require(f, n);
  return {weighted_seminorm_sq(f, r - 1.0, 0, n),
          4.0 / (r * r) * weighted_seminorm_sq(f, r + 1.0, 1, n) + 2.0 / r * tail_term(f, r, n)};
}

InequalityCheck boundary_bound(const Vec& f, double r, int n) {
  require(f, n);
  const double c = (2.0 * r * r + 4.0 * r + 1.0) / (r * (r + 1.0));
  return {tail_term(f, r, n),
          c * weighted_seminorm_sq(f, r + 1.0, 1, n) + 4.0 * (r + 1.0) * weighted_seminorm_sq(f, r, 0, n)};
}

InequalityCheck weight_ratio_lower(double p, double q, int k, int n) {
  return {rising_weight(k, p, n), rising_weight(k, p + q, n) / rising_weight(k, q, n)};
}

InequalityCheck weight_ratio_upper(double p, double q, int k, int n) {
  return {rising_weight(k, p + q, n) / rising_weight(k, q, n), binomial_real(p, q) * rising_weight(k, p, n)};
}

InequalityCheck weight_shift_lower(double p, int j, int k, int n) {
  return {rising_weight(k, p, n), rising_weight(k + j, p, n)};
}

InequalityCheck weight_shift_upper(double p, int j, int k, int n) {
  return {rising_weight(k + j, p, n), binomial_real(j, p) * rising_weight(k, p, n)};
}

InequalityCheck product_bound(const Vec& f, const Vec& g, double p, double q, int n) {
  require(f, n);
  require(g, n);
  const Vec fg = f.cwiseProduct(g);
  return {weighted_seminorm_sq(fg, p + q, 0, n),
          binomial_real(p, q) * weighted_supnorm_sq(f, p, 0, n) * weighted_seminorm_sq(g, q, 0, n)};
}

}  // namespace whip

#include "whip/blowup.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace whip {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ssr = 0.0;
};

// Least squares y ≈ intercept + slope x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double N = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.ssr += r * r;
  }
  return f;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

}  // namespace

BlowupResult detect_blowup(const std::vector<BlowupSample>& series, const BlowupOptions& opts) {
  BlowupResult out;
  if (static_cast<int>(series.size()) < opts.min_points) {
    out.rejection = "fewer than " + std::to_string(opts.min_points) + " samples";
    return out;
  }
  const int total = static_cast<int>(series.size());
  const int window = std::min(total, std::max(opts.min_points, static_cast<int>(std::ceil(opts.window_fraction * total))));

  std::vector<double> t, log_speed, log_curv;
  for (int i = total - window; i < total; ++i) {
    const BlowupSample& s = series[i];
    if (!(s.max_link_speed > 0.0) || !(s.max_curvature > 0.0)) {
      out.rejection = "nonpositive maxima in the fitted window";
      return out;
    }
    t.push_back(s.t);
    log_speed.push_back(std::log(s.max_link_speed));
    log_curv.push_back(std::log(s.max_curvature));
  }
  if (!strictly_increasing(t)) {
    out.rejection = "sample times not increasing";
    return out;
  }
  if (!strictly_increasing(log_speed) || !strictly_increasing(log_curv)) {
    out.rejection = "tail not monotone increasing";
    return out;
  }

  const double t_last = t.back();
  const double span = t_last - t.front();
  // τ = log(T - t_last); x_i = -log(T - t_i).
  auto fits = [&](double tau) {
    const double T = t_last + std::exp(tau);
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = -std::log(T - t[i]);
    return std::make_pair(fit_line(x, log_curv), fit_line(x, log_speed));
  };
  auto objective = [&](double tau) {
    const auto f = fits(tau);
    return f.first.ssr + f.second.ssr;
  };

  const double lo = std::log(opts.tiny * span);
  const double hi = std::log(opts.horizon * span);
  const int grid = 400;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double v = objective(lo + (hi - lo) * i / grid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (hi - lo) / grid;
  const double a = lo + step * std::max(best - 1, 0);
  const double b = lo + step * std::min(best + 1, grid);
  const auto min = boost::math::tools::brent_find_minima(objective, a, b, std::numeric_limits<double>::digits);
  const double tau = min.first;
  if (tau >= hi - step) {
    out.rejection = "no finite blowup time inside the search horizon";
    return out;
  }

  const auto f = fits(tau);
  BlowupFit fit;
  fit.T_est = t_last + std::exp(tau);
  fit.p_curvature = f.first.slope;
  fit.p_angular = f.second.slope;
  fit.residual_curvature = std::sqrt(f.first.ssr / window);
  fit.residual_angular = std::sqrt(f.second.ssr / window);
  fit.window = window;
  if (!(fit.p_curvature > 0.0) || !(fit.p_angular > 0.0)) {
    out.rejection = "nonpositive fitted exponent";
    return out;
  }
  out.fit = fit;
  return out;
}

}  // namespace whip

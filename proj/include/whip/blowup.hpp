#pragma once

// Power-law blowup fit: y(t) ≈ C (T - t)^{-p} for the angular speed and the
// curvature maxima, with a common blowup time T.

#include <optional>
#include <string>
#include <vector>

namespace whip {

struct BlowupSample {
  double t = 0.0;
  double max_link_speed = 0.0;  // max |∇₊η̇|
  double max_curvature = 0.0;   // max |∇₊²η|
};

struct BlowupFit {
  double T_est = 0.0;
  double p_curvature = 0.0;
  double p_angular = 0.0;
  double residual_curvature = 0.0;  // RMS of the log-space fit
  double residual_angular = 0.0;
  int window = 0;                   // samples used
};

struct BlowupOptions {
  double window_fraction = 0.25;
  int min_points = 8;
  // T - t_last is searched in [tiny, horizon] * (window time span).
  double tiny = 1e-9;
  double horizon = 1e3;
};

struct BlowupResult {
  std::optional<BlowupFit> fit;
  std::string rejection;  // empty when accepted

  bool accepted() const { return fit.has_value(); }
};

BlowupResult detect_blowup(const std::vector<BlowupSample>& series, const BlowupOptions& opts = {});

}  // namespace whip

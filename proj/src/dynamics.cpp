#include "whip/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace whip {

void IntegratorConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("integrator.cfl must lie in (0, 1]");
  if (!(dt_min > 0.0)) throw DomainError("integrator.dt_min must be positive");
  if (!(dt_min <= dt_max)) throw DomainError("integrator.dt_min must not exceed integrator.dt_max");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("integrator.t_end must be finite and >= 0");
  if (report_stride < 1) throw DomainError("integrator.report_stride must be >= 1");
  if (m_max < 0) throw DomainError("integrator.m_max must be >= 0");
  if (blowup_curvature_fraction < 0.0 || blowup_curvature_fraction > 1.0) {
    throw DomainError("integrator.blowup_curvature_fraction must lie in [0, 1]");
  }
}

Mat acceleration(const ChainState& chain, const TensionSolution& sigma) {
  const int n = chain.n;
  if (sigma.sigma.size() != n + 1) throw SizeError("acceleration: sigma must hold sigma_0..sigma_n");
  const double n2 = static_cast<double>(n) * n;
  Mat acc = Mat::Zero(chain.d, n + 1);
  for (int k = 1; k <= n; ++k) {
    auto a = acc.col(k - 1);
    a = sigma.sigma(k) * (chain.eta.col(k) - chain.eta.col(k - 1));
    if (k > 1) a -= sigma.sigma(k - 1) * (chain.eta.col(k - 1) - chain.eta.col(k - 2));
    a *= n2;
  }
  return acc;
}

double raw_cfl_dt(const ChainState& chain, const TensionSolution& sigma, const IntegratorConfig& cfg) {
  const double smax = std::max(sigma.sigma.maxCoeff(), 0.0);
  return cfg.cfl / (chain.n * std::sqrt(smax) + 1e-12);
}

double adaptive_dt(const ChainState& chain, const TensionSolution& sigma, const IntegratorConfig& cfg) {
  return std::clamp(raw_cfl_dt(chain, sigma, cfg), cfg.dt_min, cfg.dt_max);
}

ProjectionMagnitude project(ChainState& chain) {
  const int n = chain.n;
  Mat l = chain.links();
  Mat lv = chain.link_velocities();
  ProjectionMagnitude removed;
  for (int k = 0; k < n; ++k) {
    const double len = l.col(k).norm();
    if (!(len > 0.0)) throw NumericError("projection: degenerate link " + std::to_string(k + 1));
    removed.length = std::max(removed.length, std::abs(len - 1.0));
    l.col(k) /= len;
    const double radial = lv.col(k).dot(l.col(k));
    removed.orthogonal = std::max(removed.orthogonal, std::abs(radial));
    lv.col(k) -= radial * l.col(k);
  }
  const double t = chain.time;
  chain = ChainState::from_links(l, lv, t);
  return removed;
}

namespace {

struct Rate {
  Mat velocity;
  Mat accel;
};

Rate rate(const ChainState& s) {
  TensionSolution sigma;
  sigma.sigma = solve_stage_tension(s);
  return {s.eta_dot, acceleration(s, sigma)};
}

ChainState advance(const ChainState& base, const Rate& r, double h) {
  ChainState out = base;
  out.eta += h * r.velocity;
  out.eta_dot += h * r.accel;
  return out;
}

}  // namespace

ChainState step_fixed(const ChainState& chain, double dt, Scheme scheme, bool project_after, ProjectionMagnitude* removed) {
  ChainState next = chain;
  if (scheme == Scheme::rk4) {
    const Rate k1 = rate(chain);
    const Rate k2 = rate(advance(chain, k1, dt / 2));
    const Rate k3 = rate(advance(chain, k2, dt / 2));
    const Rate k4 = rate(advance(chain, k3, dt));
    next.eta += dt / 6 * (k1.velocity + 2 * k2.velocity + 2 * k3.velocity + k4.velocity);
    next.eta_dot += dt / 6 * (k1.accel + 2 * k2.accel + 2 * k3.accel + k4.accel);
  } else {
    const Rate k1 = rate(chain);
    const Rate k2 = rate(advance(chain, k1, dt));
    next.eta += dt / 2 * (k1.velocity + k2.velocity);
    next.eta_dot += dt / 2 * (k1.accel + k2.accel);
  }
  next.time = chain.time + dt;
  next.eta.col(chain.n).setZero();
  next.eta_dot.col(chain.n).setZero();
  if (!next.eta.allFinite() || !next.eta_dot.allFinite()) {
    throw NumericError("step: non-finite state at t=" + std::to_string(next.time));
  }
  if (project_after) {
    const ProjectionMagnitude m = project(next);
    if (removed) *removed = m;
  } else if (removed) {
    *removed = {};
  }
  return next;
}

ChainState step(const ChainState& chain, const IntegratorConfig& cfg, ProjectionMagnitude* removed) {
  const TensionSolution sigma = solve_tension(chain);
  const double raw = raw_cfl_dt(chain, sigma, cfg);
  if (raw < cfg.dt_min) throw StepUnderflow("step: CFL step " + std::to_string(raw) + " below dt_min");
  return step_fixed(chain, std::min(raw, cfg.dt_max), cfg.scheme, cfg.project, removed);
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::t_end_reached: return "t_end_reached";
    case Termination::negative_tension: return "negative_tension";
    case Termination::blowup_suspected: return "blowup_suspected";
    case Termination::dt_underflow: return "dt_underflow";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

double max_link_speed(const ChainState& chain) {
  return std::sqrt(chain.link_velocities().colwise().squaredNorm().maxCoeff());
}

double max_curvature(const ChainState& chain) {
  if (chain.n < 2) return 0.0;
  return std::sqrt(forward_diff(chain.eta, chain.n, 2).colwise().squaredNorm().maxCoeff());
}

Snapshot make_snapshot(const ChainState& chain, int m_max) {
  Snapshot s;
  s.state = chain;
  s.tension = solve_tension(chain);
  s.sigma_dot = solve_sigma_dot(chain, s.tension);
  s.report = energy_report(chain, s.tension, s.sigma_dot, m_max);
  s.max_link_speed = max_link_speed(chain);
  s.max_curvature = max_curvature(chain);
  if (m_max >= 3) {
    const double e2 = s.report.e[2];
    const double e3 = s.report.e[3];
    s.ratio_a = s.report.a / e2;
    s.ratio_c = s.report.c / (std::pow(e2, 1.5) * std::sqrt(e3));
    s.ratio_d = s.report.d[0] / std::pow(e3, 4);
  }
  return s;
}

namespace {

void fill_gronwall(std::vector<Snapshot>& snaps) {
  const std::size_t N = snaps.size();
  if (N < 2 || snaps[0].report.e.size() < 4) return;
  auto ratio = [&](std::size_t i, std::size_t j) {
    const double h = snaps[j].state.time - snaps[i].state.time;
    return (snaps[j].report.e_tilde[3] - snaps[i].report.e_tilde[3]) / (h * std::pow(snaps[i].report.e[3], 7));
  };
  for (std::size_t i = 0; i + 1 < N; ++i) snaps[i].gronwall = ratio(i, i + 1);
  snaps[N - 1].gronwall = ratio(N - 2, N - 1);
}

}  // namespace

Trajectory run(const ChainState& initial, const IntegratorConfig& cfg) {
  cfg.validate();
  initial.validate();
  Trajectory traj;
  ChainState state = initial;
  traj.snapshots.push_back(make_snapshot(state, cfg.m_max));
  bool last_recorded = true;
  const double t_stop = cfg.t_end;
  const double t_eps = 1e-13 * std::max(1.0, std::abs(t_stop));
  const double curvature_cap = cfg.blowup_curvature_fraction * 2.0 * state.n;

  traj.termination = Termination::t_end_reached;
  while (true) {
    const TensionSolution sigma = solve_tension(state);
    if (cfg.halt_on_negative_tension && sigma.min_sigma <= 0.0) {
      traj.termination = Termination::negative_tension;
      break;
    }
    if (curvature_cap > 0.0 && max_curvature(state) >= curvature_cap) {
      traj.termination = Termination::blowup_suspected;
      break;
    }
    if (state.time >= t_stop - t_eps) break;
    const double raw = raw_cfl_dt(state, sigma, cfg);
    if (raw < cfg.dt_min) {
      traj.termination = Termination::dt_underflow;
      break;
    }
    double dt = std::min(raw, cfg.dt_max);
    if (state.time + dt > t_stop - t_eps) dt = t_stop - state.time;
    ProjectionMagnitude removed;
    state = step_fixed(state, dt, cfg.scheme, cfg.project, &removed);
    if (std::abs(state.time - t_stop) <= t_eps) state.time = t_stop;
    ++traj.steps;
    traj.max_projection_length = std::max(traj.max_projection_length, removed.length);
    traj.max_projection_orthogonal = std::max(traj.max_projection_orthogonal, removed.orthogonal);
    last_recorded = traj.steps % cfg.report_stride == 0;
    if (last_recorded) {
      traj.snapshots.push_back(make_snapshot(state, cfg.m_max));
      traj.snapshots.back().projection = removed;
    }
  }
  if (!last_recorded) traj.snapshots.push_back(make_snapshot(state, cfg.m_max));
  fill_gronwall(traj.snapshots);
  return traj;
}

}  // namespace whip

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Tolerances are fixed here, not configurable.

#include "support.hpp"
#include "whip/blowup.hpp"
#include "whip/dynamics.hpp"
#include "whip/inequalities.hpp"
#include "whip/initial_data.hpp"
#include "whip/spectral.hpp"
#include "whip/tension.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace whip;
using namespace whip::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  fmt::print("{} {} {}: {} [{:.2f} s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, seconds_since(t0));
  std::fflush(stdout);
}

// Chain in R^3 whose successive links differ by a Gaussian kick of size
// `kick`; small kicks keep every α positive.
ChainState random_spatial_chain(Rng& rng, int n, double kick, double omega) {
  Mat links(3, n), vel(3, n);
  Eigen::Vector3d u(normal(rng), normal(rng), normal(rng));
  u.normalize();
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      u += kick * Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
      u.normalize();
    }
    Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    v = omega * (v - v.dot(u) * u);
    links.col(k) = u;
    vel.col(k) = v;
  }
  return ChainState::from_links(links, vel);
}

// Admissible (all α > 0) chains of mixed shape: planar with turns below
// π/2, spatial with small kicks, and nearly straight ones.
ChainState random_admissible(Rng& rng, int n) {
  for (;;) {
    ChainState c;
    switch (static_cast<int>(uniform(rng, 0.0, 3.0))) {
      case 0: c = random_planar_chain(rng, n, uniform(rng, 0.05, 1.4), uniform(rng, 0.1, 5.0)); break;
      case 1: c = random_spatial_chain(rng, n, uniform(rng, 0.01, 0.6), uniform(rng, 0.1, 5.0)); break;
      default: {
        // turns sized so that the curvature bound is sometimes admissible
        const double turn = uniform(rng, 0.1, 1.5) * std::sqrt(0.4 * std::sqrt(double(n))) / n;
        c = random_planar_chain(rng, n, turn, uniform(rng, 0.1, 5.0));
      }
    }
    if ((compute_alpha_beta(c).alpha.array() > 0.0).all()) return c;
  }
}

// G from a dense inverse of the operator; independent of the β recursion.
Mat brute_green(const ChainState& c) {
  const double n = c.n;
  return (-raw_operator(c) / (n * n)).inverse() / n;
}

double brute_upsilon(const ChainState& c) {
  const int n = c.n;
  double u = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    const double curv = (double(n) * n * (c.eta.col(k + 1) - 2.0 * c.eta.col(k) + c.eta.col(k - 1))).squaredNorm();
    u = std::max(u, std::pow(double(k) / n, 1.5) * curv);
  }
  return u;
}

// ---------------------------------------------------------------------------

Outcome green_vs_direct() {
  Rng rng(101);
  const auto t0 = Clock::now();
  int states = 0;
  double worst = 0.0, worst_dense = 0.0;
  for (int n : {2, 4, 8, 16, 64}) {
    for (int i = 0; i < 250; ++i, ++states) {
      const ChainState c = random_admissible(rng, n);
      const Vec g = solve_tension(c, TensionMethod::green).sigma;
      const Vec d = solve_tension(c, TensionMethod::direct).sigma;
      const double scale = d.cwiseAbs().maxCoeff();
      worst = std::max(worst, (g - d).cwiseAbs().maxCoeff() / scale);
      const Vec dense = brute_sigma(c);
      worst_dense = std::max(worst_dense, (g.tail(n) - dense).cwiseAbs().maxCoeff() / scale);
    }
  }
  const double t = seconds_since(t0);
  const bool ok = states >= 1000 && worst <= 1e-10 && worst_dense <= 1e-10 && t < 30.0;
  return {ok, fmt::format("{} states, max rel diff green/tridiagonal {:.2e}, green/dense LU {:.2e} (tol 1e-10), {:.2f} s (limit 30 s)",
                          states, worst, worst_dense, t)};
}

Outcome straight_closed_form() {
  double worst = 0.0;
  for (int n = 2; n <= 64; ++n) {
    const Mat G = green_matrix(straight_chain(n)).G;
    for (int k = 1; k <= n; ++k)
      for (int j = 1; j <= n; ++j) worst = std::max(worst, std::abs(G(k - 1, j - 1) - std::min(j, k) / double(n)));
  }
  return {worst <= 1e-13, fmt::format("n = 2..64, max |G_kj - min(j,k)/n| = {:.2e} (tol 1e-13)", worst)};
}

Outcome bound_certificates() {
  Rng rng(202);
  long chains = 0, admissible = 0;
  long diff_viol = 0, ratio_viol = 0, lower_viol = 0, corner_viol = 0, cert_disagree = 0;
  double max_diff = 0.0, max_ratio = 0.0, min_lower_margin = std::numeric_limits<double>::infinity(), corner_err = 0.0,
         brute_err = 0.0;
  const double slack = kBoundSlack;
  for (int n : {2, 3, 4, 8, 16, 32, 64}) {
    for (int i = 0; i < 200; ++i, ++chains) {
      const ChainState c = i == 0 ? straight_chain(n) : random_admissible(rng, n);
      const GreenMatrix gm = green_matrix(c);
      const Mat& G = gm.G;
      brute_err = std::max(brute_err, (G - brute_green(c)).cwiseAbs().maxCoeff());

      const double ups = brute_upsilon(c);
      const bool adm = ups <= 2.0 * std::sqrt(double(n)) / 5.0;
      admissible += adm;
      double md = 0.0, mr = 0.0, minF = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
          const double g = G(k - 1, j - 1);
          const double below = k > 1 ? G(k - 2, j - 1) : 0.0;
          md = std::max(md, std::abs(n * (g - below)));
          mr = std::max(mr, n * g / k);
          minF = std::min(minF, double(n) * n * g / (double(j) * k));
        }
      }
      max_diff = std::max(max_diff, md);
      max_ratio = std::max(max_ratio, mr);
      diff_viol += md > 1.0 + slack;
      ratio_viol += mr > 1.0 + slack;
      if (adm) {
        const double margin = minF - std::exp(-2.0 * ups);
        min_lower_margin = std::min(min_lower_margin, margin);
        lower_viol += margin < -slack;
      }
      const double F1n = n * G(0, n - 1);
      const double err = std::abs(minF - F1n) / std::max(1.0, std::abs(F1n));
      corner_err = std::max(corner_err, err);
      corner_viol += err > 1e-12;

      const BoundCertificate cert = certify_bounds(gm, c);
      cert_disagree += !cert.all_pass() || cert.upsilon_admissible != adm;
    }
  }
  const bool ok = diff_viol + ratio_viol + lower_viol + corner_viol + cert_disagree == 0 && brute_err <= 1e-10;
  return {ok, fmt::format("{} chains ({} with admissible curvature): violations diff {} ratio {} lower {} corner {}, "
                          "certificate disagreements {}; max |nΔG| {:.6f}, max nG/k {:.6f}, min lower-bound margin {:.3e}, "
                          "corner err {:.2e} (tol 1e-12), |G - dense inverse| {:.2e}",
                          chains, admissible, diff_viol, ratio_viol, lower_viol, corner_viol, cert_disagree, max_diff,
                          max_ratio, min_lower_margin, corner_err, brute_err)};
}

Trajectory rigid_period_run(int n, double omega) {
  IntegratorConfig cfg;
  cfg.t_end = 2 * M_PI / omega;
  cfg.report_stride = 20;
  return run(make_initial("rigid_rotation", n, {{"omega", omega}}), cfg);
}

Outcome conservation() {
  const int n = 64;
  const Trajectory tr = rigid_period_run(n, 1.0);
  const double u0 = tr.snapshots.front().report.u0;
  double drift = 0.0, v_err = 0.0;
  for (const Snapshot& s : tr.snapshots) {
    drift = std::max(drift, std::abs(s.report.u0 - u0) / u0);
    v_err = std::max(v_err, std::abs(s.report.v0 - (0.5 + 0.5 / n)));
  }
  // any projected chain, at several resolutions
  Rng rng(404);
  for (int m : {2, 5, 17, 64}) {
    for (int i = 0; i < 20; ++i) {
      ChainState c = random_chain(rng, m, 3);
      c.eta *= uniform(rng, 0.9, 1.1);  // off the constraint manifold
      project(c);
      v_err = std::max(v_err, std::abs(potential_v0(c) - (0.5 + 0.5 / m)));
    }
  }
  const bool ok = tr.termination == Termination::t_end_reached && drift <= 1e-6 && v_err <= 1e-14;
  return {ok, fmt::format("rigid rotation n = 64 over one period ({} steps, {}): u0 relative drift {:.2e} (tol 1e-6); "
                          "max |v0 - (1/2 + 1/(2n))| {:.2e} (round-off, tol 1e-14)",
                          tr.steps, to_string(tr.termination), drift, v_err)};
}

Outcome rigid_rotation_oracle() {
  const double omega = 1.0;
  double err[2];
  int idx = 0;
  for (int n : {32, 64}) {
    const Vec sigma = solve_tension(make_initial("rigid_rotation", n, {{"omega", omega}})).sigma;
    double e = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double s = double(k) / n;
      const double exact = omega * omega * s * (2 - s) / 2;
      e = std::max(e, std::abs(sigma(k) - exact) / exact);
    }
    err[idx++] = e;
  }
  const double ratio = err[0] / err[1];
  const Trajectory tr = rigid_period_run(64, omega);
  const Mat& eta0 = tr.snapshots.front().state.eta;
  const double pos = (tr.snapshots.back().state.eta - eta0).norm() / eta0.norm();
  const bool ok = std::abs(ratio - 2.0) <= 0.4 && pos <= 1e-4 && tr.termination == Termination::t_end_reached;
  return {ok, fmt::format("sigma max rel err n=32 {:.4e}, n=64 {:.4e}, ratio {:.4f} (want 2 +/- 20%); "
                          "position rel err after one period at n=64 {:.2e} (tol 1e-4)",
                          err[0], err[1], ratio, pos)};
}

// ---------------------------------------------------------------------------
// Weighted-norm inequalities, evaluated with lgamma weights and explicit
// differences.

struct BruteNorms {
  int n;
  double r;
  std::vector<double> w_r, w_rm1, w_rp1;  // s_k^{(r)}, s_k^{(r-1)}, s_k^{(r+1)} for k = 1..n

  static double weight(int k, double r, int n) { return std::exp(std::lgamma(k + r) - std::lgamma(double(k)) - r * std::log(double(n))); }

  BruteNorms(int n_, double r_) : n(n_), r(r_) {
    for (int k = 1; k <= n; ++k) {
      w_r.push_back(weight(k, r, n));
      w_rm1.push_back(weight(k, r - 1.0, n));
      w_rp1.push_back(weight(k, r + 1.0, n));
    }
  }

  double zeroth(const std::vector<double>& w, const Vec& f) const {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += w[k] * f(k) * f(k);
    return acc / n;
  }
  double first(const Vec& f) const {
    double acc = 0.0;
    for (int k = 0; k + 1 < n; ++k) acc += w_rp1[k] * std::pow(n * (f(k + 1) - f(k)), 2);
    return acc / n;
  }
  double tail(const Vec& f) const { return w_r[n - 1] * f(n - 1) * f(n - 1); }
};

Vec random_sequence(Rng& rng, int n, int kind) {
  Vec f(n);
  switch (kind) {
    case 0:
      for (int k = 0; k < n; ++k) f(k) = normal(rng);
      break;
    case 1: {
      const double a = normal(rng), b = normal(rng), c = normal(rng), ph = uniform(rng, 0, 2 * M_PI);
      for (int k = 0; k < n; ++k) {
        const double s = (k + 1.0) / n;
        f(k) = a + b * std::cos(M_PI * s + ph) + c * std::cos(3 * M_PI * s);
      }
      break;
    }
    case 2: {
      const double q = uniform(rng, 0.3, 1.7);
      for (int k = 0; k < n; ++k) f(k) = std::pow(q, k);
      break;
    }
    case 3: {
      f.setZero();
      f(static_cast<int>(uniform(rng, 0, n))) = normal(rng);
      break;
    }
    case 4: {
      f.setConstant(normal(rng));
      break;
    }
    default: {
      const double p = uniform(rng, -2.0, 2.0);
      for (int k = 0; k < n; ++k) f(k) = std::pow((k + 1.0) / n, p);
    }
  }
  return f;
}

Outcome inequality_suite() {
  Rng rng(606);
  const int samples = 10000;
  long checked = 0, violations = 0, disagreements = 0;
  double worst_ratio[3] = {0.0, 0.0, 0.0};
  auto holds = [](double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-12) + 1e-300; };
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}); };
  for (int n : {4, 16, 64}) {
    for (double r : {0.5, 1.0, 1.5, 2.0}) {
      const BruteNorms B(n, r);
      for (int i = 0; i < samples; ++i, ++checked) {
        const Vec f = random_sequence(rng, n, i % 6);
        const double first = B.first(f), tail = B.tail(f);
        double pointwise = 0.0;
        for (int k = 0; k < n; ++k) pointwise = std::max(pointwise, B.w_r[k] * f(k) * f(k));

        const double lhs[3] = {pointwise, B.zeroth(B.w_rm1, f), tail};
        const double rhs[3] = {tail + first / r, 4.0 / (r * r) * first + 2.0 / r * tail,
                               (2 * r * r + 4 * r + 1) / (r * (r + 1)) * first + 4 * (r + 1) * B.zeroth(B.w_r, f)};
        const InequalityCheck lib[3] = {pointwise_weighted_bound(f, r, n), lower_order_bound(f, r, n), boundary_bound(f, r, n)};
        for (int e = 0; e < 3; ++e) {
          violations += !holds(lhs[e], rhs[e]) || !lib[e].holds();
          disagreements += !close(lhs[e], lib[e].lhs) || !close(rhs[e], lib[e].rhs);
          if (rhs[e] > 0) worst_ratio[e] = std::max(worst_ratio[e], lhs[e] / rhs[e]);
        }
      }
    }
  }
  return {violations == 0 && disagreements == 0,
          fmt::format("{} sequences x 3 inequalities: {} violations, {} library/oracle disagreements; "
                      "max lhs/rhs pointwise {:.6f}, lower-order {:.6f}, boundary {:.6f}",
                      checked, violations, disagreements, worst_ratio[0], worst_ratio[1], worst_ratio[2])};
}

// ---------------------------------------------------------------------------
// Spectral checks with an inner product written out from its definition.

double oracle_r(int m, int j) {
  if (2 * m - j - 2 < 0) return 0.0;
  return std::exp(std::lgamma(2.0 * m + j + 1) - std::lgamma(2.0 * m - j - 1)) / (2.0 * m * (2.0 * m - 1));
}

double oracle_inner(const Vec& f, const Vec& g, int j, int n) {
  auto rho = [n](int k) { return double(k) * (2.0 * n + 1 - k) / (double(n) * n); };
  double acc = 0.0;
  for (int k = 1; k <= n - j / 2; ++k) {
    double w = 1.0;
    for (int i = 0; i <= j; ++i) w *= rho(k + i);
    double df = 0.0, dg = 0.0;
    for (int i = 0; i <= j; ++i) {
      const double c = ((j - i) % 2 ? -1.0 : 1.0) * binom(j, i);
      df += c * f(k + i - 1);
      dg += c * g(k + i - 1);
    }
    acc += w * df * dg * std::pow(double(n), 2 * j);
  }
  return acc / n;
}

Outcome spectral_certificates() {
  double gram = 0.0, rmj = 0.0, rmj_lib = 0.0;
  for (int n : {8, 16}) {
    std::vector<Vec> q;
    for (int m = 1; m <= n; ++m) q.push_back(basis_q(m, n));
    for (int m = 1; m <= n; ++m)
      for (int l = 1; l <= n; ++l) gram = std::max(gram, std::abs(oracle_inner(q[m - 1], q[l - 1], 0, n) - (m == l)));
    for (int m = 1; m <= 8; ++m) {
      for (int j = 0; j <= 3; ++j) {
        const double want = oracle_r(m, j);
        const double got = oracle_inner(q[m - 1], q[m - 1], j, n);
        rmj = std::max(rmj, std::abs(got - want) / std::max(1.0, want));
        rmj_lib = std::max(rmj_lib, std::abs(r_mj(m, j) - want) / std::max(1.0, want));
      }
    }
  }

  Rng rng(707);
  double fg = 0.0, iso = 0.0;
  for (int n : {8, 16, 64, 256}) {
    for (int i = 0; i < 10; ++i) {
      Vec theta(n);
      for (int k = 0; k < n; ++k) theta(k) = normal(rng);
      if (i % 2) {
        const double a = normal(rng), b = normal(rng);
        for (int k = 0; k < n; ++k) theta(k) = a * std::cos(M_PI * (k + 0.5) / n) + b * std::sin(5.0 * (k + 0.5) / n);
      }
      const SpectralCoeffs A = continuize_Gn(theta);
      fg = std::max(fg, (discretize_Fn(A, n) - theta).cwiseAbs().maxCoeff() / std::max(1.0, theta.cwiseAbs().maxCoeff()));
      const double disc = oracle_inner(even_extend_angles(theta), even_extend_angles(theta), 0, n);
      const double cont = continuous_norm_sq(A, 0);
      iso = std::max(iso, std::abs(disc - cont) / disc);
    }
  }
  const bool ok = gram <= 1e-10 && rmj <= 1e-8 && rmj_lib <= 1e-8 && fg <= 1e-12 && iso <= 1e-10;
  return {ok, fmt::format("n in {{8,16}}: Gram j=0 max dev {:.2e} (tol 1e-10), discrete norms vs r_mj (j<=3, m<=8) {:.2e} "
                          "(tol 1e-8), library r_mj {:.2e}; F_n G_n - id {:.2e} (tol 1e-12); isometry j=0 {:.2e} (tol 1e-10)",
                          gram, rmj, rmj_lib, fg, iso)};
}

// ---------------------------------------------------------------------------

Outcome blowup_detector() {
  double err = 0.0;
  for (const auto& [pc, pa] : {std::pair{1.5, 1.0}, std::pair{1.0, 1.5}}) {
    const double T = 1.3;
    std::vector<BlowupSample> series;
    for (int i = 0; i < 400; ++i) {
      const double t = 1.29 * i / 399.0;
      series.push_back({t, 0.7 * std::pow(T - t, -pa), 2.0 * std::pow(T - t, -pc)});
    }
    const BlowupResult b = detect_blowup(series);
    if (!b.accepted()) return {false, "synthetic power law rejected: " + b.rejection};
    err = std::max({err, std::abs(b.fit->p_curvature - pc), std::abs(b.fit->p_angular - pa)});
  }

  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  cfg.blowup_curvature_fraction = 0.7;
  const Trajectory tr = run(make_initial("near_loop", 64), cfg);
  std::vector<BlowupSample> samples;
  for (const Snapshot& s : tr.snapshots) samples.push_back({s.state.time, s.max_link_speed, s.max_curvature});
  const BlowupResult b = detect_blowup(samples);
  if (!b.accepted()) return {false, fmt::format("synthetic exponent err {:.2e}; near-loop fit rejected: {}", err, b.rejection)};
  const BlowupFit& f = *b.fit;
  const bool ok = err <= 1e-6 && std::isfinite(f.T_est);
  return {ok, fmt::format("synthetic exponents 1.0/1.5 recovered to {:.2e} (tol 1e-6); near-loop n=64 ({}, t = {:.5f}): "
                          "T_est {:.6f}, p_curvature {:.4f}, p_angular {:.4f}, residuals {:.3e}/{:.3e}, window {}",
                          err, to_string(tr.termination), tr.snapshots.back().state.time, f.T_est, f.p_curvature,
                          f.p_angular, f.residual_curvature, f.residual_angular, f.window)};
}

Outcome monitored_ratios() {
  struct Case {
    std::string name;
    ChainState init;
    IntegratorConfig cfg;
  };
  std::vector<Case> cases;
  {
    IntegratorConfig c;
    c.t_end = 1.0;
    cases.push_back({"perturbed n=32", make_initial("perturbed", 32, {}, 3), c});
    cases.push_back({"rigid rotation n=64", make_initial("rigid_rotation", 64), c});
    cases.push_back({"curved n=48", make_initial("near_loop", 48, {{"turn", 1.0}, {"width", 0.3}, {"omega", 1.0}}), c});
    c.t_end = 2.0;
    c.blowup_curvature_fraction = 0.7;
    cases.push_back({"near-loop n=64", make_initial("near_loop", 64), c});
  }
  std::string detail;
  bool ok = true;
  for (const Case& cs : cases) {
    const Trajectory tr = run(cs.init, cs.cfg);
    const bool passing = tr.termination == Termination::t_end_reached || tr.termination == Termination::blowup_suspected;
    double lo[4], hi[4];
    std::fill(lo, lo + 4, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + 4, -std::numeric_limits<double>::infinity());
    long nonfinite = 0;
    for (const Snapshot& s : tr.snapshots) {
      const double v[4] = {s.ratio_a, s.ratio_c, s.ratio_d, s.gronwall};
      for (int i = 0; i < 4; ++i) {
        nonfinite += !std::isfinite(v[i]);
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    }
    ok = ok && passing && nonfinite == 0;
    detail += fmt::format("{}{} ({}, {} snapshots, {} non-finite): a/e2 [{:.3g}, {:.3g}] c [{:.3g}, {:.3g}] d1/e3^4 [{:.3g}, {:.3g}] "
                          "gronwall [{:.3g}, {:.3g}]",
                          detail.empty() ? "" : "; ", cs.name, to_string(tr.termination), tr.snapshots.size(), nonfinite,
                          lo[0], hi[0], lo[1], hi[1], lo[2], hi[2], lo[3], hi[3]);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  report(1, "green function vs direct tension solve", green_vs_direct);
  report(2, "straight-chain green function closed form", straight_closed_form);
  report(3, "green function bound certificates", bound_certificates);
  report(4, "conserved quantities", conservation);
  report(5, "rigid rotation tension and period", rigid_rotation_oracle);
  report(6, "weighted-norm inequality suite", inequality_suite);
  report(7, "spectral basis certificates", spectral_certificates);
  report(8, "blowup detector", blowup_detector);
  report(9, "monitored ratios finite", monitored_ratios);
  fmt::print("{} of 9 criteria failed, total {:.1f} s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}

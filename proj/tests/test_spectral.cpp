#include "support.hpp"
#include "whip/initial_data.hpp"
#include "whip/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace whip;
using namespace whip::testing;

namespace {

// (2m+j)! / ((2m-j-2)! 2m(2m-1)) through the gamma function.
double r_oracle(int m, int j) {
  if (2 * m - j - 2 < 0) return 0.0;
  return std::exp(std::lgamma(2.0 * m + j + 1) - std::lgamma(2.0 * m - j - 1)) / (2.0 * m * (2.0 * m - 1));
}

Vec random_angles(Rng& rng, int n) {
  Vec th(n);
  for (int k = 0; k < n; ++k) th(k) = uniform(rng, -2.0, 2.0);
  return th;
}

// θ(s) = cos(πs) + 0.3 cos(2πs): even about s = 1.
double smooth_theta(double s) { return std::cos(M_PI * s) + 0.3 * std::cos(2 * M_PI * s); }
double smooth_theta_deriv(double s, int j) {
  const double a = std::pow(M_PI, j), b = 0.3 * std::pow(2 * M_PI, j);
  const double ph = j * M_PI / 2;
  return a * std::cos(M_PI * s + ph) + b * std::cos(2 * M_PI * s + ph);
}

}  // namespace

TEST_CASE("norm constants") {
  CHECK(r_mj(2, 1) == 10.0);
  CHECK(r_mj(1, 0) == 1.0);
  CHECK(r_mj(1, 1) == 0.0);
  CHECK(r_mj(2, 3) == 0.0);
  for (int m = 1; m <= 12; ++m)
    for (int j = 0; j <= 3; ++j) CHECK(std::abs(r_mj(m, j) - r_oracle(m, j)) <= 1e-8 * std::max(1.0, r_oracle(m, j)));
  CHECK_THROWS_AS(r_mj(0, 0), DomainError);
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  for (int p : {1, 2, 5, 8, 33}) {
    const Quadrature q = gauss_legendre01(p);
    CHECK(q.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int deg = 0; deg < 2 * p; ++deg) {
      double acc = 0.0;
      for (int i = 0; i < p; ++i) acc += q.weights(i) * std::pow(q.nodes(i), deg);
      CHECK(acc == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("continuous basis") {
  // normalising constant: K_m² = (4m-1) / (2m(2m-1)) and Q_m(0) = K_m r(r+1)/2, r = 2m-1
  for (int m = 1; m <= 10; ++m) {
    const double K = std::sqrt((4.0 * m - 1) / (2.0 * m * (2.0 * m - 1)));
    const double r = 2 * m - 1;
    Vec zero(1);
    zero << 0.0;
    CHECK(basis_Q(m, zero)(0) == doctest::Approx(K * r * (r + 1) / 2).epsilon(1e-12));
  }
  // Gram matrix in every ⟨⟨·,·⟩⟩_{ρ,j}, j ≤ 3, by independent quadrature
  const Quadrature q = gauss_legendre01(40);
  for (int j = 0; j <= 3; ++j) {
    for (int m = 1; m <= 8; ++m) {
      for (int l = 1; l <= 8; ++l) {
        const Vec a = basis_Q(m, q.nodes, j), b = basis_Q(l, q.nodes, j);
        double acc = 0.0;
        for (int i = 0; i < q.nodes.size(); ++i) {
          const double s = q.nodes(i);
          acc += q.weights(i) * std::pow(s * (2 - s), j + 1) * a(i) * b(i);
        }
        const double expect = m == l ? r_oracle(m, j) : 0.0;
        CHECK(std::abs(acc - expect) <= 1e-10 * std::max(1.0, r_oracle(std::max(m, l), j)));
      }
    }
  }
  // derivative against a central difference
  Vec s(3);
  s << 0.2, 0.55, 0.9;
  const double h = 1e-6;
  const Vec d1 = basis_Q(4, s, 1);
  const Vec fd = (basis_Q(4, (s.array() + h).matrix()) - basis_Q(4, (s.array() - h).matrix())) / (2 * h);
  CHECK((d1 - fd).norm() <= 1e-6 * d1.norm());
}

TEST_CASE("discrete basis is orthogonal in every weighted inner product") {
  for (int n : {8, 16}) {
    const auto table = hahn_table(n);
    for (int j = 0; j <= 3; ++j) {
      for (int m = 1; m <= n; ++m) {
        for (int l = 1; l <= n; ++l) {
          const double g = discrete_inner(table->row(m - 1).transpose(), table->row(l - 1).transpose(), j, n);
          const double expect = m == l ? r_oracle(m, j) : 0.0;
          const double scale = std::max({1.0, r_oracle(m, j), r_oracle(l, j)});
          INFO("n=" << n << " j=" << j << " m=" << m << " l=" << l);
          CHECK(std::abs(g - expect) <= 1e-10 * scale);
        }
      }
    }
  }
  // high resolution: j = 0 Gram and evenness
  const int n = 256;
  const auto table = hahn_table(n);
  double worst = 0.0;
  for (int m = 1; m <= n; m += 17) {
    for (int l = 1; l <= n; l += 13) {
      const double g = discrete_inner(table->row(m - 1).transpose(), table->row(l - 1).transpose(), 0, n);
      worst = std::max(worst, std::abs(g - (m == l ? 1.0 : 0.0)));
    }
    const Vec q = basis_q(m, n);
    CHECK(q(0) > 0.0);
    CHECK((q - q.reverse()).cwiseAbs().maxCoeff() <= 1e-12 * q.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-10);
  CHECK(hahn_table(n).get() == table.get());
  CHECK_THROWS_AS(basis_q(5, 4), DomainError);

  // low modes approach the continuous basis
  for (int m = 1; m <= 3; ++m) {
    Vec s(n);
    for (int k = 1; k <= n; ++k) s(k - 1) = static_cast<double>(k) / n;
    const Vec Q = basis_Q(m, s);
    const Vec qd = basis_q(m, n).head(n);
    CHECK((Q - qd).cwiseAbs().maxCoeff() <= 0.05 * Q.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("interpolation maps") {
  Rng rng(21);
  for (int n : {4, 8, 32, 128}) {
    const Vec th = random_angles(rng, n);
    const SpectralCoeffs a = continuize_Gn(th);
    CHECK(a.coeffs.size() == n);
    // F_n ∘ G_n = id
    CHECK((discretize_Fn(a, n) - th).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, th.cwiseAbs().maxCoeff()));
    // discrete Parseval in each j, and the isometry into the continuous space
    for (int j = 0; j <= 3 && j <= n; ++j) {
      double expect = 0.0;
      for (int m = 1; m <= n; ++m) expect += r_oracle(m, j) * a.coeffs(m - 1) * a.coeffs(m - 1);
      CHECK(discrete_norm_sq(th, j) == doctest::Approx(expect).epsilon(1e-9));
    }
    if (n <= 32) {
      CHECK(continuous_norm_sq(a, 0) == doctest::Approx(discrete_norm_sq(th, 0)).epsilon(1e-11));
      CHECK(continuous_norm_sq(a, 2) == doctest::Approx(discrete_norm_sq(th, 2)).epsilon(1e-9));
    }
  }

  // smooth θ: discrete norms of F_nθ rise monotonically to the continuous ones
  const SpectralCoeffs A = project_continuous(smooth_theta, 40, 256);
  for (int j = 0; j <= 3; ++j) {
    const double exact = continuous_norm_sq([j](double s) { return smooth_theta_deriv(s, j); }, j, 256);
    double prev = 0.0;
    for (int n : {8, 16, 32}) {
      const double v = discrete_norm_sq(discretize_Fn(A, n), j);
      CHECK(v >= prev * (1 - 1e-12));
      CHECK(v <= exact * (1 + 1e-10));
      prev = v;
    }
    CHECK(prev == doctest::Approx(exact).epsilon(1e-6));
  }
  // the expansion reproduces θ
  for (double s : {0.0, 0.3, 0.77, 1.0}) CHECK(evaluate_continuous(A, s) == doctest::Approx(smooth_theta(s)).epsilon(1e-9));
}

TEST_CASE("angles round trip") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const ChainState c = random_planar_chain(rng, 10 + t, 2.5, 1.5);
    const ChainState back = theta_to_eta(eta_to_theta(c));
    CHECK((back.eta - c.eta).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.eta_dot - c.eta_dot).cwiseAbs().maxCoeff() <= 1e-12);
    const AngleState a = eta_to_theta(c);
    for (int k = 1; k < c.n; ++k) CHECK(std::abs(a.theta(k) - a.theta(k - 1)) <= M_PI);
  }
  // exact reversal unwraps to +π
  Mat links(2, 2), vel = Mat::Zero(2, 2);
  links << 1.0, -1.0, 0.0, 0.0;
  const AngleState rev = eta_to_theta(ChainState::from_links(links, vel));
  CHECK(rev.theta(1) - rev.theta(0) == doctest::Approx(M_PI));

  CHECK_THROWS_AS(eta_to_theta(random_chain(rng, 6, 3)), UnsupportedDimension);
  CHECK_THROWS_AS(transfer_resolution(random_chain(rng, 6, 3), 12), UnsupportedDimension);
}

TEST_CASE("resolution transfer") {
  const ChainState straight = make_initial("rigid_rotation", 16, {{"angle", 0.4}, {"omega", 2.0}});
  const ChainState up = transfer_resolution(straight, 40);
  CHECK(up.n == 40);
  // θ ≡ const is the first mode; its discrete value at resolution n is
  // (n²·3 / ((n+1)(2n+1)))^{1/2}, so the line stays straight and the constant
  // is rescaled by the ratio of the two normalisations
  const auto q1 = [](double n) { return std::sqrt(3.0 * n * n / ((n + 1) * (2 * n + 1))); };
  const AngleState a = eta_to_theta(up);
  const double scale = q1(40) / q1(16);
  CHECK((a.theta.array() - 0.4 * scale).abs().maxCoeff() <= 1e-12);
  CHECK((a.theta_dot.array() - 2.0 * scale).abs().maxCoeff() <= 1e-12);
  CHECK(up.drift().length <= 1e-14);
  const ChainState same = transfer_resolution(straight, 16);
  CHECK((same.eta - straight.eta).cwiseAbs().maxCoeff() <= 1e-12);

  // smooth curved chain: e₃ survives doubling the resolution
  Vec th(32), om(32);
  for (int k = 0; k < 32; ++k) {
    const double s = (k + 1.0) / 32;
    th(k) = 0.6 * std::cos(M_PI * s);
    om(k) = 1.0 + 0.3 * std::cos(M_PI * s);
  }
  const ChainState curved = chain_from_angles(th, om);
  const double e3 = discrete_energy(curved, 3)[3];
  CHECK(discrete_energy(transfer_resolution(curved, 64), 3)[3] == doctest::Approx(e3).epsilon(0.01));

  // up then down is the identity
  Rng rng(9);
  const ChainState c = random_planar_chain(rng, 12, 0.5, 1.0);
  const ChainState round = transfer_resolution(transfer_resolution(c, 24), 12);
  CHECK((round.eta - c.eta).cwiseAbs().maxCoeff() <= 1e-11);
  CHECK((round.eta_dot - c.eta_dot).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("angle and position norms are equivalent") {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const ChainState c = random_planar_chain(rng, 16 + 4 * t, 0.05 + 0.02 * t, 1.0);
    const NormPair p = angle_position_norms(c);
    CHECK(p.B <= 10.0 * (p.A + p.A * p.A + p.A * p.A * p.A));
    CHECK(p.A <= 10.0 * (p.B + p.B * p.B));
  }
  const NormPair zero = angle_position_norms(make_initial("straight", 12));
  CHECK(zero.A == 0.0);
  CHECK(zero.B == doctest::Approx(0.0).epsilon(1e-20));
}

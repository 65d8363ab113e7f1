#include "mstep/tuning.hpp"

#include "mstep/graph.hpp"
#include "mstep/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mstep;

TEST_CASE("heavy-ball optimal tuning closed forms") {
  TuningResult unit = multistep_optimal(1, 1);
  CHECK(unit.alpha == doctest::Approx(1.0));
  CHECK(unit.beta == doctest::Approx(0.0));
  CHECK(unit.predicted_q == doctest::Approx(0.0));

  TuningResult t = multistep_optimal(2, 4);
  CHECK(t.alpha == doctest::Approx(0.343146).epsilon(1e-5));
  CHECK(t.beta == doctest::Approx(0.029437).epsilon(1e-4));
  CHECK(t.predicted_q == doctest::Approx(0.171573).epsilon(1e-5));

  CHECK(multistep_optimal(1, 100).predicted_q ==
        doctest::Approx(9.0 / 11.0).epsilon(1e-12));

  CHECK_THROWS_AS(multistep_optimal(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(multistep_optimal(4, 2), std::invalid_argument);
}

TEST_CASE("conservative tuning from separate curvature and graph bounds") {
  TuningResult same = multistep_conservative(1, 1, 2, 4);
  TuningResult direct = multistep_optimal(2, 4);
  CHECK(same.alpha == doctest::Approx(direct.alpha));
  CHECK(same.predicted_q == doctest::Approx(direct.predicted_q));

  TuningResult t = multistep_conservative(1, 4, 2, 2);
  CHECK(t.lambda_lo == doctest::Approx(2.0));
  CHECK(t.lambda_hi == doctest::Approx(8.0));
  CHECK(t.predicted_q == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("one-step optimal tuning") {
  TuningResult t = gradient_optimal(2, 4);
  CHECK(t.alpha == doctest::Approx(1.0 / 3.0));
  CHECK(t.beta == 0.0);
  CHECK(t.predicted_q == doctest::Approx(1.0 / 3.0));
  CHECK(gradient_optimal(1, 1).predicted_q == doctest::Approx(0.0));
}

TEST_CASE("heavy-ball beats one-step tuning everywhere") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    double a = u(rng), b = u(rng);
    double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(multistep_optimal(lo, hi).predicted_q <=
          gradient_optimal(lo, hi).predicted_q + 1e-14);
  }
}

TEST_CASE("guaranteed factor at given step sizes") {
  TuningResult t = multistep_optimal(2, 4);
  CHECK(multistep_factor(t.alpha, t.beta, 2, 4) ==
        doctest::Approx(std::sqrt(t.beta)).epsilon(1e-12));
  CHECK(multistep_factor(1.0 / 3.0, 0.0, 2, 4) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(multistep_factor(2 * (1 + 0.1) / 4.0, 0.1, 2, 4),
                  std::invalid_argument);

  CHECK(gradient_factor(0.5, 1, 3) == doctest::Approx(0.5));
  CHECK(gradient_factor(0.1, 1, 3) == doctest::Approx(0.9));
  CHECK(gradient_factor(2.0 / 3.0 - 1e-9, 1, 3) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(gradient_factor(1.0, 1, 3), std::invalid_argument);
}

namespace {

// Exact asymptotic factor of the scalar momentum recursion at curvature
// lambda: the larger root modulus of mu^2 - (1 + beta - alpha*lambda) mu +
// beta.  Complex roots (underdamped) have modulus sqrt(beta); real roots use
// the quadratic formula.
double scalar_root_modulus(double alpha, double beta, double lambda) {
  const double b = 1.0 + beta - alpha * lambda;
  const double disc = b * b - 4.0 * beta;
  if (disc <= 0.0) return std::sqrt(beta);
  return 0.5 * (std::abs(b) + std::sqrt(disc));
}

double exact_interval_factor(double alpha, double beta, double lo, double hi) {
  return std::max(scalar_root_modulus(alpha, beta, lo),
                  scalar_root_modulus(alpha, beta, hi));
}

}  // namespace

TEST_CASE("optimal tuning minimizes the exact two-point factor on a grid") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = u(rng), b = u(rng);
    double lo = std::min(a, b), hi = std::max(a, b) + 0.01;
    double q_star = multistep_optimal(lo, hi).predicted_q;
    for (int i = 1; i <= 30; ++i) {
      double beta = (i - 1) / 30.0;
      for (int j = 1; j <= 30; ++j) {
        double alpha = 2 * (1 + beta) / hi * j / 31.0;
        CHECK(q_star <= exact_interval_factor(alpha, beta, lo, hi) + 1e-9);
      }
    }
  }
}

TEST_CASE("closed-form factor never exceeds the exact two-point factor") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = u(rng), b = u(rng);
    double lo = std::min(a, b), hi = std::max(a, b) + 0.01;
    double beta = std::uniform_real_distribution<double>(0.0, 0.97)(rng);
    double alpha = std::uniform_real_distribution<double>(
        1e-3, 2 * (1 + beta) / hi * 0.999)(rng);
    double exact = exact_interval_factor(alpha, beta, lo, hi);
    CHECK(multistep_factor(alpha, beta, lo, hi) <= exact + 1e-12);
    // when both endpoints are underdamped the two agree exactly
    if ((1 + beta - alpha * lo) * (1 + beta - alpha * lo) <= 4 * beta &&
        (1 + beta - alpha * hi) * (1 + beta - alpha * hi) <= 4 * beta) {
      CHECK(multistep_factor(alpha, beta, lo, hi) ==
            doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("tuning is scale invariant") {
  // generic pairs: invariant to within the rounding of the scaled inputs
  for (double gamma : {0.1, 1.0, 10.0, 1000.0}) {
    TuningResult base = multistep_optimal(2, 4);
    TuningResult scaled = multistep_optimal(gamma * 2, gamma * 4);
    CHECK(scaled.beta == doctest::Approx(base.beta).epsilon(1e-14));
    CHECK(scaled.predicted_q ==
          doctest::Approx(base.predicted_q).epsilon(1e-14));
    CHECK(scaled.alpha == doctest::Approx(base.alpha / gamma).epsilon(1e-14));
  }
  // the ring-16 Laplacian spectrum: bitwise identical across the whole
  // gamma sweep
  SpectralSummary s = wh_spectrum(laplacian(make_topology(Topology::kRing, 16)),
                                  Eigen::VectorXd::Ones(16));
  double q_ref =
      multistep_optimal(s.lambda_min_nonzero, s.lambda_max).predicted_q;
  for (double gamma : {0.1, 1.0, 10.0, 1000.0}) {
    CHECK(multistep_optimal(gamma * s.lambda_min_nonzero,
                            gamma * s.lambda_max)
              .predicted_q == q_ref);
  }
}

TEST_CASE("dual tuning from curvature and Gram bounds") {
  TuningResult unit = dual_multistep_params(1, 1, 1, 1);
  CHECK(unit.alpha == doctest::Approx(1.0));
  CHECK(unit.predicted_q == doctest::Approx(0.0));

  TuningResult t = dual_multistep_params(1, 1, 1, 4);
  CHECK(t.predicted_q == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("stability of misestimated tunings") {
  CHECK_FALSE(stability_check(0.5, 3.0, 4.0));
  CHECK(stability_check(2.0, 3.0, 4.0));
  CHECK(stability_check(1.0, 4.0, 4.0));  // exact estimates always pass
}

TEST_CASE("safe perturbation ball has radius lambda_lo / sqrt(2)") {
  const double lo = 1.0, hi = 4.0;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(0, 2 * 3.14159265358979);
  std::uniform_real_distribution<double> radius(0, lo / std::sqrt(2.0) - 1e-9);
  for (int trial = 0; trial < 2000; ++trial) {
    double r = radius(rng), th = angle(rng);
    double eps_lo = r * std::cos(th), eps_hi = r * std::sin(th);
    if (lo + eps_lo <= 0 || hi + eps_hi < lo + eps_lo) continue;
    CHECK(stability_check(lo + eps_lo, hi + eps_hi, hi));
  }
  // just outside the ball, along the binding direction eps_lo = eps_hi:
  double r = lo / std::sqrt(2.0) + 1e-6;
  CHECK_FALSE(stability_check(lo - r / std::sqrt(2.0), hi - r / std::sqrt(2.0),
                              hi));
}

TEST_CASE("factors under misestimated bounds") {
  PerturbedBounds exact{1, 4, 1, 4};
  PerturbedFactors f0 = perturbed_factors(exact);
  CHECK(f0.gradient_q == doctest::Approx(0.6));
  CHECK(f0.multistep_q == doctest::Approx(1.0 / 3.0));

  PerturbedBounds wide{0.2, 4.8, 1, 4};
  PerturbedFactors fw = perturbed_factors(wide);
  CHECK(fw.gradient_q == doctest::Approx(0.6).epsilon(1e-12));
  double beta_t = std::pow((std::sqrt(4.8) - std::sqrt(0.2)) /
                               (std::sqrt(4.8) + std::sqrt(0.2)),
                           2);
  CHECK(fw.multistep_q == doctest::Approx(std::sqrt(beta_t)).epsilon(1e-9));

  PerturbedBounds sym{0.5, 4.5, 1, 4};
  PerturbedFactors fs = perturbed_factors(sym);
  CHECK(fs.multistep_q == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fs.gradient_q == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(fs.multistep_q < fs.gradient_q);

  PerturbedBounds unstable{0.5, 3.0, 1, 4};
  CHECK_THROWS_AS(perturbed_factors(unstable), std::invalid_argument);
}

TEST_CASE("fourth-quadrant crossover predicate") {
  CHECK(gradient_wins_predicate({0.2, 4.8, 1, 4}));       // ratio 24 >= 16
  CHECK_FALSE(gradient_wins_predicate({0.5, 4.5, 1, 4}));  // ratio 9 < 16
  CHECK_THROWS_AS(gradient_wins_predicate({1.1, 4.1, 1, 4}),
                  std::invalid_argument);
}

TEST_CASE("outside the fourth quadrant the heavy-ball tuning never loses") {
  const double lo = 1.0, hi = 4.0;
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-0.9, 3.0);
  int checked = 0;
  while (checked < 10000) {
    double eps_lo = u(rng), eps_hi = u(rng);
    if (eps_lo < 0 && eps_hi > 0) continue;  // skip the fourth quadrant
    PerturbedBounds b{lo + eps_lo, hi + eps_hi, lo, hi};
    if (!(b.est_lo > 0) || b.est_hi < b.est_lo) continue;
    if (!stability_check(b.est_lo, b.est_hi, hi)) continue;
    PerturbedFactors f = perturbed_factors(b);
    CHECK(f.multistep_q <= f.gradient_q + 1e-10);
    ++checked;
  }
}

TEST_CASE("two-tap register tuning") {
  ShiftRegisterTuning zero = shift_register_zeta(0.0);
  CHECK(zero.zeta == doctest::Approx(1.0));
  CHECK(zero.predicted_q == doctest::Approx(0.0));

  ShiftRegisterTuning t = shift_register_zeta(0.9);
  CHECK(t.zeta == doctest::Approx(1.392863).epsilon(1e-5));
  CHECK(t.predicted_q == doctest::Approx(0.626789).epsilon(1e-5));

  for (double lp = 0.05; lp < 1.0; lp += 0.05) {
    CHECK(shift_register_zeta(lp).predicted_q < lp);
  }
  CHECK_THROWS_AS(shift_register_zeta(1.0), std::invalid_argument);
}

TEST_CASE("jointly optimal register weights") {
  Graph k2(2, {{1, 2}});
  ShiftRegisterJoint j2 = shift_register_joint_optimal(laplacian(k2));
  CHECK(j2.theta == doctest::Approx(0.5));
  CHECK(j2.zeta == doctest::Approx(1.0));
  Eigen::MatrixXd expect(2, 2);
  expect << 0.5, 0.5, 0.5, 0.5;
  CHECK((j2.consensus_q - expect).norm() <= 1e-12);

  Graph ring4 = make_topology(Topology::kRing, 4);
  ShiftRegisterJoint j4 = shift_register_joint_optimal(laplacian(ring4));
  CHECK(j4.theta == doctest::Approx(1.0 / 3.0));
  CHECK(j4.zeta == doctest::Approx(1.029437).epsilon(1e-5));
}

TEST_CASE("momentum consensus parameters") {
  Graph ring4 = make_topology(Topology::kRing, 4);
  NesterovParams p = nesterov_consensus_params(laplacian(ring4));
  CHECK(p.step == doctest::Approx(0.25));
  CHECK(p.momentum == doctest::Approx(0.171573).epsilon(1e-5));

  Graph k2(2, {{1, 2}});
  NesterovParams p2 = nesterov_consensus_params(laplacian(k2));
  CHECK(p2.step == doctest::Approx(0.5));
  CHECK(p2.momentum == doctest::Approx(0.0));

  Graph k6 = make_topology(Topology::kComplete, 6);
  CHECK(nesterov_consensus_params(laplacian(k6)).momentum ==
        doctest::Approx(0.0));
}

TEST_CASE("routing Gram bounds") {
  NumBounds id = num_bounds(Eigen::MatrixXd::Identity(3, 3));
  CHECK(id.gram_lo == doctest::Approx(1.0));
  CHECK(id.gram_hi == doctest::Approx(1.0));

  Eigen::MatrixXd r(2, 5);
  r << 1, 0, 1, 1, 0,
       0, 1, 1, 0, 1;  // columns 4, 5 single-link
  NumBounds b = num_bounds(r);
  CHECK(b.longest_route == 2);
  CHECK(b.busiest_link == 3);
  CHECK(b.gram_hi == doctest::Approx(6.0));
  Eigen::VectorXd gram = sym_eigenvalues(r * r.transpose());
  CHECK(gram[0] >= 1.0 - 1e-10);
  CHECK(gram[1] <= 6.0 + 1e-10);
}

TEST_CASE("routing Gram bounds sandwich the true spectrum") {
  std::mt19937_64 rng(23);
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> links_d(2, 8), extra_d(0, 12);
  for (int trial = 0; trial < 100; ++trial) {
    int links = links_d(rng), extra = extra_d(rng);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(links, extra + links);
    for (int s = 0; s < extra; ++s) {
      int used = 0;
      while (used == 0) {
        used = 0;
        for (int l = 0; l < links; ++l) {
          r(l, s) = coin(rng) ? 1.0 : 0.0;
          used += static_cast<int>(r(l, s));
        }
      }
    }
    for (int l = 0; l < links; ++l) r(l, extra + l) = 1.0;
    NumBounds b = num_bounds(r);
    Eigen::VectorXd gram = sym_eigenvalues(r * r.transpose());
    CHECK(gram[0] >= 1.0 - 1e-9);
    CHECK(gram[links - 1] <= b.gram_hi + 1e-9);
  }
}

TEST_CASE("dual congestion-control tuning") {
  Eigen::MatrixXd r(2, 4);
  r << 1, 1, 1, 0,
       1, 1, 0, 1;  // l_max = 2, s_max = 3... columns 3,4 single-link
  NumBounds b = num_bounds(r);
  TuningResult t = num_params(r, 1, 1);
  double root = std::sqrt(static_cast<double>(b.gram_hi));
  CHECK(t.predicted_q == doctest::Approx((root - 1) / (root + 1)));

  TuningResult tid = num_params(Eigen::MatrixXd::Identity(3, 3), 1, 1);
  CHECK(tid.predicted_q == doctest::Approx(0.0));
  // l_max * s_max = 4 gives the worked numbers alpha = 4/9, beta = 1/9
  Eigen::MatrixXd r2(2, 3);
  r2 << 1, 1, 0,
        1, 0, 1;
  NumBounds b2 = num_bounds(r2);
  CHECK(b2.gram_hi == doctest::Approx(4.0));
  TuningResult t2 = num_params(r2, 1, 1);
  CHECK(t2.alpha == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(t2.beta == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(t2.predicted_q == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

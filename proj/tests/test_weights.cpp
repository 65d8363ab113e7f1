#include "mstep/weights.hpp"

#include "mstep/spectral.hpp"
#include "mstep/tuning.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace mstep;

TEST_CASE("heuristic weight schemes on ring-4") {
  Graph ring4 = make_topology(Topology::kRing, 4);
  Eigen::MatrixXd l = laplacian(ring4);

  WeightMatrix metro = heuristic_weights(ring4, WeightScheme::kMetropolis);
  CHECK((metro.matrix - l / 3.0).norm() <= 1e-12);
  Eigen::VectorXd ev = sym_eigenvalues(metro.matrix);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0 / 3.0));
  CHECK(ev[2] == doctest::Approx(2.0 / 3.0));
  CHECK(ev[3] == doctest::Approx(4.0 / 3.0));

  WeightMatrix best = heuristic_weights(ring4, WeightScheme::kBestConstant);
  CHECK((best.matrix - l / 3.0).norm() <= 1e-12);

  WeightMatrix maxdeg = heuristic_weights(ring4, WeightScheme::kMaxDegree);
  CHECK((maxdeg.matrix - l / 2.0).norm() <= 1e-12);

  WeightMatrix lap = heuristic_weights(ring4, WeightScheme::kLaplacian);
  CHECK((lap.matrix - l).norm() == 0.0);
}

TEST_CASE("max-degree and best-constant are scalar multiples on any graph") {
  for (auto kind : {Topology::kPath, Topology::kDumbbell, Topology::kRandom}) {
    Graph g = make_topology(kind, 9, 42, 0.35);
    Eigen::MatrixXd a = heuristic_weights(g, WeightScheme::kMaxDegree).matrix;
    Eigen::MatrixXd b =
        heuristic_weights(g, WeightScheme::kBestConstant).matrix;
    double gamma = b(0, 1) != 0 ? a(0, 1) / b(0, 1) : a(0, 0) / b(0, 0);
    CHECK((a - gamma * b).norm() <= 1e-10 * a.norm());
  }
}

TEST_CASE("every scheme satisfies sparsity, symmetry and kernel conditions") {
  std::vector<WeightScheme> schemes = {
      WeightScheme::kLaplacian, WeightScheme::kMaxDegree,
      WeightScheme::kBestConstant, WeightScheme::kMetropolis,
      WeightScheme::kSdp};
  Graph g = make_topology(Topology::kRandom, 8, 3, 0.4);
  Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(8, 1.0, 3.0);
  for (WeightScheme scheme : schemes) {
    WeightMatrix w = scheme == WeightScheme::kSdp
                         ? sdp_optimal_weights(g, h).weights
                         : heuristic_weights(g, scheme);
    const Eigen::MatrixXd& m = w.matrix;
    CHECK((m - m.transpose()).norm() <= 1e-9 * (1 + m.norm()));
    // off-pattern entries are zero
    Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(8, 8);
    for (auto [v, u] : g.edges()) {
      mask(v - 1, u - 1) = mask(u - 1, v - 1) = 1;
    }
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        if (i != j && mask(i, j) == 0) CHECK(std::abs(m(i, j)) <= 1e-8);
      }
    }
    Eigen::VectorXd ev = sym_eigenvalues(m);
    CHECK(ev[0] >= -1e-9 * std::max(1.0, ev[7]));
    if (scheme == WeightScheme::kSdp) {
      // kernel condition in the transformed coordinates
      Eigen::VectorXd v_dir = h.array().rsqrt().matrix().normalized();
      Eigen::MatrixXd omega = h.array().sqrt().matrix().asDiagonal() * m *
                              h.array().sqrt().matrix().asDiagonal();
      CHECK((omega * v_dir).norm() <= 1e-6 * (1 + omega.norm()));
    } else {
      CHECK((m * Eigen::VectorXd::Ones(8)).norm() <= 1e-9 * (1 + m.norm()));
    }
  }
}

TEST_CASE("optimized weights on the complete triangle reach ratio 1") {
  Graph k3 = make_topology(Topology::kComplete, 3);
  SdpWeightResult r = sdp_optimal_weights(k3, Eigen::VectorXd::Ones(3));
  CHECK(r.condition_number == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("optimized weights on the 3-path reach the analytic ratio 3") {
  Graph p3 = make_topology(Topology::kPath, 3);
  SdpWeightResult r = sdp_optimal_weights(p3, Eigen::VectorXd::Ones(3));
  CHECK(r.condition_number == doctest::Approx(3.0).epsilon(2e-3));
}

TEST_CASE("optimized weights never lose to the heuristics") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    Graph g = make_topology(Topology::kRandom, 7, 100 + trial, 0.45);
    Eigen::VectorXd h = Eigen::VectorXd::Ones(7);
    for (int i = 0; i < 7; ++i) {
      h[i] = 0.5 + 2.5 * std::uniform_real_distribution<double>(0, 1)(rng);
    }
    double best_heuristic = 1e300;
    for (WeightScheme scheme :
         {WeightScheme::kMaxDegree, WeightScheme::kMetropolis,
          WeightScheme::kBestConstant}) {
      SpectralSummary s =
          wh_spectrum(heuristic_weights(g, scheme).matrix, h);
      best_heuristic =
          std::min(best_heuristic, s.lambda_max / s.lambda_min_nonzero);
    }
    SdpWeightResult r = sdp_optimal_weights(g, h);
    CHECK(r.condition_number <= best_heuristic + 1e-3);
    SpectralSummary achieved = wh_spectrum(r.weights.matrix, h);
    CHECK(achieved.lambda_max / achieved.lambda_min_nonzero ==
          doctest::Approx(r.condition_number).epsilon(1e-4));
  }
}

TEST_CASE("scaled weights give identical predicted factors") {
  Graph g = make_topology(Topology::kRing, 6);
  Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(6, 1.0, 2.0);
  WeightMatrix w = heuristic_weights(g, WeightScheme::kMetropolis);
  SpectralSummary base = wh_spectrum(w.matrix, h);
  TuningResult t0 = multistep_optimal(base.lambda_min_nonzero, base.lambda_max);
  for (double gamma : {0.1, 10.0, 1000.0}) {
    SpectralSummary s = wh_spectrum(gamma * w.matrix, h);
    TuningResult t = multistep_optimal(s.lambda_min_nonzero, s.lambda_max);
    CHECK(t.predicted_q == doctest::Approx(t0.predicted_q).epsilon(1e-12));
  }
}

TEST_CASE("dense matrix round trip") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, -2.5, 3.125, 0.1, 0.2, 0.3;
  std::stringstream s;
  write_dense_matrix(m, s);
  CHECK((read_dense_matrix(s) - m).norm() == 0.0);
}

TEST_CASE("weight-design export lists the problem data") {
  Graph ring4 = make_topology(Topology::kRing, 4);
  std::stringstream s;
  write_sdp_export(ring4, Eigen::VectorXd::Ones(4), s);
  std::string text = s.str();
  CHECK(text.find("n 4") != std::string::npos);
  CHECK(text.find("edges 4") != std::string::npos);
  CHECK(text.find("kernel") != std::string::npos);
}

TEST_CASE("scheme names round trip") {
  for (WeightScheme s : {WeightScheme::kLaplacian, WeightScheme::kMaxDegree,
                         WeightScheme::kBestConstant, WeightScheme::kMetropolis,
                         WeightScheme::kSdp}) {
    CHECK(weight_scheme_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(weight_scheme_from_string("nope"), std::invalid_argument);
}

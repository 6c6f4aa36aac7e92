#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sccdag/recover.hpp"

using namespace sccdag;

TEST_CASE("hungarian_admissible") {
  CHECK(hungarian_admissible(Eigen::MatrixXd::Identity(4, 4), 1e-3) == Permutation{0, 1, 2, 3});
  Eigen::Matrix2d W;
  W << 0, 1, 1, -0.5;  // rows of [[1, -0.5], [0, 1]] exchanged
  const Permutation p = hungarian_admissible(W, 1e-3);
  CHECK(p == Permutation{1, 0});
  CHECK(permute_rows(W, p) == (Eigen::Matrix2d() << 1, -0.5, 0, 1).finished());
  Eigen::Matrix3d Z = Eigen::Matrix3d::Random();
  Z.col(1).setZero();
  CHECK_THROWS_AS(hungarian_admissible(Z, 1e-3), NumericalError);
}

TEST_CASE("min_cost_assignment matches brute force") {
  Rng rng(51);
  for (int t = 0; t < 500; ++t) {
    const int d = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd cost(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) cost(i, j) = rng.uniform(-5.0, 5.0);
    const auto col_to_row = min_cost_assignment(cost);
    double got = 0;
    for (int j = 0; j < d; ++j) got += cost(col_to_row[static_cast<std::size_t>(j)], j);
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double v = 0;
      for (int j = 0; j < d; ++j) v += cost(perm[static_cast<std::size_t>(j)], j);
      best = std::min(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    REQUIRE(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("property: hungarian objective is optimal for d <= 6") {
  Rng rng(52);
  for (int t = 0; t < 500; ++t) {
    const int d = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd W(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) W(i, j) = rng.bernoulli(0.4) ? 0.0 : rng.uniform(-3.0, 3.0);
    const auto best = oracle::best_assignment(W, 1e-3);
    if (!best) {
      REQUIRE_THROWS_AS(hungarian_admissible(W, 1e-3), NumericalError);
      continue;
    }
    REQUIRE(oracle::log_diag(W, hungarian_admissible(W, 1e-3)) == doctest::Approx(*best).epsilon(1e-12));
  }
}

TEST_CASE("enumerate_admissible") {
  CHECK(enumerate_admissible(Eigen::MatrixXd::Identity(3, 3), 1e-3) == std::vector<Permutation>{{0, 1, 2}});
  CHECK(enumerate_admissible(Eigen::MatrixXd::Ones(3, 3), 1e-3).size() == 6);
  const Eigen::MatrixXd W = five_node_example().demixing();
  CHECK(enumerate_admissible(W, 1e-3) == oracle::admissible_permutations(W, 1e-3));
  Rng rng(53);
  for (int t = 0; t < 200; ++t) {
    const int d = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd R(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) R(i, j) = rng.bernoulli(0.5) ? 0.0 : rng.uniform(-1.0, 1.0);
    REQUIRE(enumerate_admissible(R, 1e-3) == oracle::admissible_permutations(R, 1e-3));
  }
  CHECK_THROWS_AS(enumerate_admissible(Eigen::MatrixXd::Identity(13, 13), 1e-3), Error);
}

TEST_CASE("b_from_w") {
  const Eigen::MatrixXd B = five_node_example().matrix();
  const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(5, 5) - B;
  const CandidateAdjacency c = b_from_w(W, {0, 1, 2, 3, 4});
  CHECK(c.B == B);
  CHECK(c.spectralRadius == doctest::Approx(std::cbrt(0.6)));
  const Eigen::VectorXd scale = (Eigen::VectorXd(5) << 2.0, -0.5, 3.0, 7.0, -1.0).finished();
  CHECK(b_from_w(scale.asDiagonal() * W, {0, 1, 2, 3, 4}).B.isApprox(B, 1e-15));
  CHECK_THROWS_AS(b_from_w(Eigen::MatrixXd::Zero(2, 2), {0, 1}), NumericalError);
}

TEST_CASE("threshold") {
  Eigen::Matrix2d B;
  B << 0, 0.05, 0.2, 0;
  CHECK(threshold_entries(B, 0.1) == (Eigen::Matrix2d() << 0, 0, 0.2, 0).finished());
  CHECK(threshold_entries(B, 0.0) == B);
  CHECK(threshold_entries(B, 0.2) == (Eigen::Matrix2d() << 0, 0, 0.2, 0).finished());
}

TEST_CASE("property: threshold is idempotent and monotone") {
  Rng rng(54);
  for (int t = 0; t < 200; ++t) {
    Eigen::MatrixXd B(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) B(i, j) = rng.uniform(-1.0, 1.0);
    const double t1 = rng.uniform(), t2 = t1 + rng.uniform();
    const Eigen::MatrixXd a = threshold_entries(B, t1), b = threshold_entries(B, t2);
    REQUIRE(threshold_entries(a, t1) == a);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) REQUIRE((b(i, j) == 0.0 || a(i, j) != 0.0));
  }
}

TEST_CASE("threshold recomputes the spectral radius") {
  Eigen::Matrix2d B;
  B << 0, 0.05, 2.0, 0;
  const CandidateAdjacency c{B, {0, 1}, spectral_radius(B)};
  CHECK(c.spectralRadius > 0.3);
  CHECK(threshold(c, 0.1).spectralRadius == 0.0);
}

TEST_CASE("enumeration respects maxCandidates and judges the thresholded candidate") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ScmSpec s = generate_scm(8, 3, 0.5, 0.5, 0.95, Regime::Stable, seed);
    const Eigen::MatrixXd W = s.B.demixing();
    RecoverOptions o;
    o.mode = SelectionMode::EnumerateFirstStable;
    o.enumerationPrune = 0.0;
    o.maxCandidates = 1;
    Permutation first;
    for_each_admissible(W, 0.0, [&](const Permutation& p) {
      first = p;
      return false;
    });
    std::size_t examined = 0;
    const CandidateAdjacency c = select_candidate(W, o, &examined);
    CHECK(examined == 1);
    const CandidateAdjacency expected = threshold(b_from_w(W, first), o.tau);
    CHECK(c.permutation == expected.permutation);
    CHECK(c.spectralRadius == doctest::Approx(spectral_radius(c.B)));
  }
  RecoverOptions bad;
  bad.maxCandidates = 0;
  CHECK_THROWS_AS(recover_from_demixing(Eigen::MatrixXd::Identity(3, 3), bad), Error);
}

TEST_CASE("first_stable_select") {
  auto make = [](std::vector<double> radii) {
    std::vector<CandidateAdjacency> out;
    for (double r : radii) out.push_back({Eigen::MatrixXd(), {}, r});
    return out;
  };
  CHECK(first_stable_index(make({1.3, 0.8, 0.7})) == 1);
  CHECK(first_stable_index(make({1.5, 1.2})) == 1);
  CHECK(first_stable_index(make({1.2, 1.2})) == 0);
  CHECK_THROWS_AS(first_stable_index(make({})), Error);
}

TEST_CASE("noiseless stable SCM: first-stable enumeration returns the true B") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ScmSpec s = generate_scm(8, 3, 0.5, 0.5, 0.95, Regime::Stable, seed);
    RecoverOptions o;
    o.mode = SelectionMode::EnumerateFirstStable;
    o.enumerationPrune = 0.0;
    const CandidateAdjacency c = select_candidate(s.B.demixing(), o);
    REQUIRE(c.B.isApprox(s.B.matrix(), 1e-12));
  }
}

TEST_CASE("property: noiseless condensation is the same for every admissible permutation") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ScmSpec s = generate_scm(8, 3, 0.5, 0.5, 0.95, seed % 2 ? Regime::Unstable : Regime::Stable, seed);
    const Eigen::MatrixXd W = s.B.demixing();
    const Condensation truth = condense(s.B.support());
    for (const auto& p : enumerate_admissible(W, 1e-3))
      REQUIRE(condensation_of(threshold(b_from_w(W, p), 0.1).B) == truth);
  }
}

TEST_CASE("recover_condensation on the example") {
  const ScmSpec s = make_scm(five_node_example());
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RecoverOptions o;
    o.ica.seed = seed;
    const RecoveryResult r = recover_condensation(sample(s, 10000, seed), o);
    hits += r.condensation == condense(s.B.support());
    CHECK(r.timings.totalMs >= r.timings.icaMs);
    CHECK(r.icaIterations >= 1);
  }
  CHECK(hits >= 9);
}

TEST_CASE("threshold failure modes on a grid cell") {
  const ScmSpec s = generate_scm(10, 4, 0.5, 0.5, 0.95, Regime::Stable, 0);
  const DemixingEstimate e = fastica(sample(s, 5000, 0));
  auto size_at = [&](double tau) {
    RecoverOptions o;
    o.tau = tau;
    return recover_from_demixing(e.W, o).partition().cluster_count();
  };
  CHECK(size_at(0.01) == 1);
  CHECK(size_at(1.0) == 10);
}

TEST_CASE("selection modes agree on a well-estimated example") {
  const ScmSpec s = make_scm(five_node_example());
  const DemixingEstimate e = fastica(sample(s, 20000, 3));
  RecoverOptions h, f;
  f.mode = SelectionMode::EnumerateFirstStable;
  CHECK(recover_from_demixing(e.W, h).condensation == recover_from_demixing(e.W, f).condensation);
  CHECK(selection_mode_from_string(to_string(SelectionMode::EnumerateFirstStable)) ==
        SelectionMode::EnumerateFirstStable);
  CHECK_THROWS_AS(selection_mode_from_string("greedy"), Error);
}

TEST_CASE("recovery JSON") {
  const ScmSpec s = make_scm(five_node_example());
  const auto j = to_json(recover_condensation(sample(s, 5000, 1)));
  CHECK(j["partition"].size() == 5);
  CHECK(j["bHat"].size() == 5);
  CHECK(j.contains("timings"));
  CHECK(j["tau"] == 0.1);
}

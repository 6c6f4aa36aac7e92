#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "sccdag/ica.hpp"
#include "sccdag/rng.hpp"
#include "sccdag/recover.hpp"
#include "sccdag/scm.hpp"

using namespace sccdag;

namespace {

Eigen::MatrixXd cov(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
  return C.transpose() * C / static_cast<double>(X.rows());
}

Eigen::MatrixXd row_normalized(const Eigen::MatrixXd& W) {
  Eigen::MatrixXd out = W;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    Eigen::Index j;
    W.row(i).cwiseAbs().maxCoeff(&j);
    out.row(i) /= W(i, j);
  }
  return out;
}

}  // namespace

TEST_CASE("whitening of a diagonal covariance") {
  Rng rng(41);
  SampleMatrix X(50000, 2);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    X(r, 0) = 2.0 * rng.laplace(1.0) + 3.0;
    X(r, 1) = rng.laplace(1.0) - 1.0;
  }
  const Whitening w = center_whiten(X);
  CHECK(cov(w.Z).isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-10));
  CHECK(w.mean(0) == doctest::Approx(X.col(0).mean()));
  // K^T K = Cov(X)^{-1}, and each row of K is (up to sign) an axis scaled by 1/sd.
  CHECK((w.K.transpose() * w.K).isApprox(cov(X).inverse(), 1e-10));
  Eigen::MatrixXd absK = w.K.cwiseAbs();
  const double big = absK.maxCoeff(), small = absK.rowwise().maxCoeff().minCoeff();
  CHECK(big == doctest::Approx(1.0).epsilon(0.02));
  CHECK(small == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("whitening of already white data is near orthogonal") {
  Rng rng(42);
  SampleMatrix X(100000, 3);
  for (Eigen::Index r = 0; r < X.rows(); ++r)
    for (Eigen::Index c = 0; c < 3; ++c) X(r, c) = rng.normal();
  const Whitening w = center_whiten(X);
  CHECK((w.K * w.K.transpose()).isApprox(Eigen::MatrixXd::Identity(3, 3), 0.02));
}

TEST_CASE("whitening preconditions") {
  CHECK_THROWS_AS(center_whiten(SampleMatrix::Ones(3, 3)), Error);
  SampleMatrix X = SampleMatrix::Random(100, 3);
  X.col(2) = X.col(0);
  CHECK_THROWS_AS(center_whiten(X), NumericalError);
}

TEST_CASE("symmetric decorrelation gives orthonormal rows") {
  const Eigen::MatrixXd W = Eigen::MatrixXd::Random(5, 5);
  const Eigen::MatrixXd D = symmetric_decorrelation(W);
  CHECK((D * D.transpose()).isApprox(Eigen::MatrixXd::Identity(5, 5), 1e-12));
}

TEST_CASE("identity mixing recovers a scaled permutation") {
  const ScmSpec s = make_scm(WeightedAdjacency(Eigen::MatrixXd::Zero(4, 4)));
  const DemixingEstimate e = fastica(sample(s, 100000, 1));
  CHECK(e.converged);
  const Eigen::MatrixXd N = row_normalized(e.W);
  int ones = 0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (std::abs(N(i, j) - 1.0) < 1e-12) {
        ++ones;
        continue;
      }
      CHECK(std::abs(N(i, j)) < 0.05);
    }
  CHECK(ones == 4);
}

TEST_CASE("example SCM: some admissible permutation recovers the support") {
  const ScmSpec s = make_scm(five_node_example());
  const DirectedGraph truth = s.B.support();
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    IcaOptions o;
    o.seed = seed;
    const DemixingEstimate e = fastica(sample(s, 10000, seed), o);
    bool found = false;
    for_each_admissible(e.W, 1e-3, [&](const Permutation& p) {
      found = support_graph(threshold(b_from_w(e.W, p), 0.1).B) == truth;
      return !found;
    });
    hits += found;
  }
  CHECK(hits >= 9);
}

TEST_CASE("fastica determinism, iteration bounds and options") {
  const ScmSpec s = generate_scm(6, 2, 0.5, 0.5, 0.95, Regime::Stable, 4);
  const SampleMatrix X = sample(s, 5000, 4);
  IcaOptions o;
  o.seed = 17;
  const DemixingEstimate a = fastica(X, o), b = fastica(X, o);
  CHECK(a.W == b.W);
  CHECK(a.iterations >= 1);
  CHECK(a.iterations <= o.maxIterations);
  CHECK(a.restart >= 0);
  CHECK(a.restart < o.restarts);
  CHECK((a.Wwhite * a.Wwhite.transpose()).isApprox(Eigen::MatrixXd::Identity(6, 6), 1e-9));

  o.maxIterations = 1;
  const DemixingEstimate c = fastica(X, o);
  CHECK(c.iterations == 1);

  o = {};
  o.nonlinearity = Nonlinearity::Cube;
  CHECK(fastica(X, o).W.allFinite());
  o.restarts = 0;
  CHECK_THROWS_AS(fastica(X, o), Error);
}

TEST_CASE("property: estimated sources are uncorrelated") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ScmSpec s = generate_scm(8, 3, 0.5, 0.5, 0.95, Regime::Stable, seed);
    const SampleMatrix X = sample(s, 100000, seed);
    const DemixingEstimate e = fastica(X);
    const Eigen::MatrixXd S = (X.rowwise() - X.colwise().mean()) * e.W.transpose();
    const Eigen::MatrixXd C = cov(S);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = i + 1; j < 8; ++j) CHECK(std::abs(C(i, j)) / std::sqrt(C(i, i) * C(j, j)) < 0.05);
  }
}

TEST_CASE("property: recovered support is invariant to global scaling of X") {
  const ScmSpec s = generate_scm(8, 3, 0.5, 0.5, 0.95, Regime::Stable, 7);
  const SampleMatrix X = sample(s, 20000, 7);
  RecoverOptions o;
  const RecoveryResult a = recover_condensation(X, o);
  for (double c : {0.01, 3.0, 250.0}) {
    const RecoveryResult b = recover_condensation(c * X, o);
    CHECK(support_graph(b.bHat.B) == support_graph(a.bHat.B));
  }
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "sccdag/errors.hpp"
#include "sccdag/graph.hpp"

namespace sccdag {

/// Observations, one row per sample.
using SampleMatrix = Eigen::MatrixXd;

enum class Regime { Stable, Unstable };
enum class NoiseFamily { Laplace, CenteredExponential };

std::string to_string(Regime r);
std::string to_string(NoiseFamily f);
Regime regime_from_string(const std::string& s);
NoiseFamily noise_family_from_string(const std::string& s);

/// Spectral radius the generator rescales to: 0.9 (stable) or 1.5 (unstable).
double regime_target(Regime r);

/// Independent noise per node; `scale` is the standard deviation.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Laplace;
  double scale = 1.0;
};

/// max_i |lambda_i(B)|.
template <typename Derived>
typename Derived::RealScalar spectral_radius(const Eigen::MatrixBase<Derived>& B) {
  using Real = typename Derived::RealScalar;
  using Plain = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (B.rows() != B.cols()) throw Error("spectral_radius: matrix must be square");
  if (B.size() == 0) return Real(0);
  Eigen::EigenSolver<Plain> solver(Plain(B), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Weighted adjacency B of X = BX + e. Row i holds the equation of X_i, so a
/// nonzero B(i, j) is the edge j -> i. The diagonal is zero and I - B must be
/// invertible.
template <typename Scalar>
class BasicWeightedAdjacency {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicWeightedAdjacency() = default;

  explicit BasicWeightedAdjacency(Matrix B, Scalar det_tolerance = Scalar(1e-10)) : B_(std::move(B)) {
    if (B_.rows() != B_.cols()) throw Error("WeightedAdjacency: matrix must be square");
    if (!B_.allFinite()) throw Error("WeightedAdjacency: non-finite entry");
    if ((B_.diagonal().array() != Scalar(0)).any())
      throw Error("WeightedAdjacency: diagonal must be zero");
    const Matrix IminusB = Matrix::Identity(B_.rows(), B_.cols()) - B_;
    if (B_.size() > 0 && std::abs(IminusB.determinant()) < det_tolerance)
      throw NumericalError("WeightedAdjacency: I - B is singular");
  }

  int size() const { return static_cast<int>(B_.rows()); }
  const Matrix& matrix() const { return B_; }
  Scalar operator()(int i, int j) const { return B_(i, j); }

  DirectedGraph support() const { return support_graph(B_); }

  /// Smallest nonzero |B(i, j)|; zero for an empty graph.
  Scalar beta_min() const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < B_.size(); ++i)
      if (B_.data()[i] != Scalar(0)) best = std::min(best, std::abs(B_.data()[i]));
    return std::isinf(best) ? Scalar(0) : best;
  }

  Matrix demixing() const { return Matrix::Identity(B_.rows(), B_.cols()) - B_; }
  Matrix mixing() const { return demixing().inverse(); }

 private:
  Matrix B_;
};

using WeightedAdjacency = BasicWeightedAdjacency<double>;

struct ScmSpec {
  WeightedAdjacency B;
  NoiseSpec noise;
  Regime regime = Regime::Stable;
  double betaMin = 0.0;
  std::uint64_t seed = 0;
};

/// Builds an ScmSpec from an explicit B; the regime follows rho(B) < 1.
ScmSpec make_scm(WeightedAdjacency B, NoiseSpec noise = {}, std::uint64_t seed = 0);

/// The five-variable cyclic SCM with the 3-cycle X2 -> X3 -> X4 -> X2
/// (zero-indexed 1 -> 2 -> 3 -> 1) plus X1 -> X2 and X2 -> X5.
WeightedAdjacency five_node_example();

/// Random cyclic SCM with exactly `kappa` non-trivial SCCs. Each SCC is
/// closed by a Hamilton cycle; chords inside an SCC and forward edges along
/// a random cluster order are kept with probability `lambda`. Weights are
/// uniform in [weight_low, weight_high] with random sign, then B is scaled so
/// that rho(B) equals regime_target(regime).
ScmSpec generate_scm(int d, int kappa, double lambda, double weight_low, double weight_high, Regime regime,
                     std::uint64_t seed, NoiseSpec noise = {});

/// n x d matrix of independent noise draws, filled row by row.
Eigen::MatrixXd sample_noise(const NoiseSpec& noise, int n, int d, std::uint64_t seed);

/// n observations of X = (I - B)^{-1} e.
SampleMatrix sample(const ScmSpec& scm, int n, std::uint64_t seed);

/// do(X_pi = c) for a union of SCCs pi; the remaining block solves
/// X_rest = (I - B_rest,rest)^{-1} (B_rest,pi c + e_rest).
SampleMatrix hard_cluster_intervention(const ScmSpec& scm, std::span<const int> pi, const Eigen::VectorXd& c, int n,
                                       std::uint64_t seed);

/// Shift intervention X = (I - B)^{-1} (e + delta).
SampleMatrix soft_cluster_intervention(const ScmSpec& scm, const Eigen::VectorXd& delta, int n, std::uint64_t seed);

/// Dense matrix as a JSON array of rows.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScmSpec& scm);
ScmSpec scm_from_json(const nlohmann::json& j);

/// CSV with header X1,...,Xd and values printed with %.17g.
void write_samples_csv(std::ostream& out, const SampleMatrix& X);
SampleMatrix read_samples_csv(std::istream& in);

}  // namespace sccdag

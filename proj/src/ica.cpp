#include "sccdag/ica.hpp"

#include <cmath>
#include <numbers>

#include "sccdag/rng.hpp"

namespace sccdag {

namespace {

// E[log cosh(v)] and E[v^4 / 4] for v ~ N(0, 1).
constexpr double kGaussianLogCosh = 0.374567207491438;
constexpr double kGaussianQuartic = 0.75;

double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double objective(const Eigen::MatrixXd& Y, Nonlinearity g) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < Y.cols(); ++c) {
    double contrast;
    if (g == Nonlinearity::LogCosh)
      contrast = Y.col(c).unaryExpr([](double y) { return log_cosh(y); }).mean() - kGaussianLogCosh;
    else
      contrast = Y.col(c).array().pow(4).mean() / 4.0 - kGaussianQuartic;
    total += contrast * contrast;
  }
  return total;
}

struct RunResult {
  Eigen::MatrixXd W;
  int iterations = 0;
  bool converged = false;
};

RunResult fixed_point(const Eigen::MatrixXd& Z, Eigen::MatrixXd W, const IcaOptions& opts) {
  const double n = static_cast<double>(Z.rows());
  RunResult out;
  Eigen::MatrixXd Y, G;
  Eigen::VectorXd mean_derivative;
  for (int it = 1; it <= opts.maxIterations; ++it) {
    Y.noalias() = Z * W.transpose();
    if (opts.nonlinearity == Nonlinearity::LogCosh) {
      G = Y.array().tanh().matrix();
      mean_derivative = (1.0 - G.array().square()).colwise().mean().transpose();
    } else {
      G = Y.array().cube().matrix();
      mean_derivative = 3.0 * Y.array().square().colwise().mean().transpose();
    }
    Eigen::MatrixXd next = (G.transpose() * Z) / n;
    next -= mean_derivative.asDiagonal() * W;
    next = symmetric_decorrelation(next);

    const double change = 1.0 - (next * W.transpose()).diagonal().cwiseAbs().minCoeff();
    W = std::move(next);
    out.iterations = it;
    if (change < opts.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.W = std::move(W);
  return out;
}

}  // namespace

std::string to_string(Nonlinearity g) { return g == Nonlinearity::LogCosh ? "logcosh" : "cube"; }

Nonlinearity nonlinearity_from_string(const std::string& s) {
  if (s == "logcosh") return Nonlinearity::LogCosh;
  if (s == "cube") return Nonlinearity::Cube;
  throw Error("unknown nonlinearity '" + s + "' (expected logcosh|cube)");
}

Whitening center_whiten(const SampleMatrix& X) {
  const Eigen::Index n = X.rows(), d = X.cols();
  if (d < 1) throw Error("center_whiten: no variables");
  if (n <= d)
    throw Error("center_whiten: need more samples than variables (n = " + std::to_string(n) +
                ", d = " + std::to_string(d) + ")");
  Whitening w;
  w.mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd Xc = X.rowwise() - w.mean.transpose();
  const Eigen::MatrixXd cov = (Xc.transpose() * Xc) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericalError("center_whiten: eigensolver did not converge");
  const Eigen::VectorXd& evals = es.eigenvalues();
  if (!(evals.minCoeff() > 1e-10 * evals.maxCoeff()))
    throw NumericalError("center_whiten: sample covariance is rank deficient");
  w.K = evals.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  w.Z = Xc * w.K.transpose();
  return w;
}

Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W * W.transpose());
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0))
    throw NumericalError("symmetric_decorrelation: W W^T is not positive definite");
  const Eigen::MatrixXd& E = es.eigenvectors();
  return E * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * E.transpose() * W;
}

DemixingEstimate fastica(const SampleMatrix& X, const IcaOptions& opts) {
  if (!(opts.tolerance > 0)) throw Error("fastica: tolerance must be positive");
  if (opts.maxIterations < 1) throw Error("fastica: maxIterations must be at least 1");
  if (opts.restarts < 1) throw Error("fastica: restarts must be at least 1");
  if (!X.allFinite()) throw Error("fastica: non-finite sample");

  const Whitening wh = center_whiten(X);
  const Eigen::Index d = X.cols();

  DemixingEstimate best;
  bool have_best = false;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed({opts.seed, hash_tag("ica/restart"), static_cast<std::uint64_t>(r)}));
    Eigen::MatrixXd init(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) init(i, j) = rng.normal();
    RunResult run = fixed_point(wh.Z, symmetric_decorrelation(init), opts);
    const double score = objective(wh.Z * run.W.transpose(), opts.nonlinearity);
    if (!have_best || score > best.objective) {
      best.Wwhite = std::move(run.W);
      best.iterations = run.iterations;
      best.converged = run.converged;
      best.objective = score;
      best.restart = r;
      have_best = true;
    }
  }
  best.W = best.Wwhite * wh.K;
  return best;
}

}  // namespace sccdag

#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "sccdag/scm.hpp"

namespace sccdag {

enum class Nonlinearity { LogCosh, Cube };

std::string to_string(Nonlinearity g);
Nonlinearity nonlinearity_from_string(const std::string& s);

struct IcaOptions {
  Nonlinearity nonlinearity = Nonlinearity::LogCosh;
  double tolerance = 1e-6;
  int maxIterations = 500;
  int restarts = 3;
  std::uint64_t seed = 0;
};

struct Whitening {
  Eigen::MatrixXd Z;     ///< (X - mean) K^T, identity sample covariance
  Eigen::MatrixXd K;     ///< whitening matrix, d x d
  Eigen::VectorXd mean;  ///< column means of X
};

/// Centers X and whitens it through the eigendecomposition of the sample
/// covariance (1/n normalization), K = D^{-1/2} E^T.
Whitening center_whiten(const SampleMatrix& X);

struct DemixingEstimate {
  Eigen::MatrixXd W;       ///< acts on raw X: sources = W x (up to permutation, sign, scale)
  Eigen::MatrixXd Wwhite;  ///< orthonormal rows in whitened coordinates; W = Wwhite K
  int iterations = 0;      ///< fixed-point iterations of the winning restart
  bool converged = false;
  double objective = 0.0;  ///< sum_i (E G(y_i) - E G(nu))^2, larger is less Gaussian
  int restart = 0;         ///< index of the winning restart
};

/// Symmetric (parallel) FastICA with symmetric decorrelation
/// W <- (W W^T)^{-1/2} W after every update. Converged when
/// 1 - min_i |<w_i_new, w_i_old>| < tolerance. With several restarts the
/// largest objective wins, ties going to the lower restart index.
DemixingEstimate fastica(const SampleMatrix& X, const IcaOptions& opts = {});

/// (W W^T)^{-1/2} W.
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& W);

}  // namespace sccdag

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "sccdag/graph.hpp"
#include "sccdag/ica.hpp"
#include "sccdag/scm.hpp"

namespace sccdag {

/// Row permutation P: row i of P W is row perm[i] of W.
using Permutation = std::vector<int>;

/// P W for the row permutation `perm`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> permute_rows(
    const Eigen::MatrixBase<Derived>& W, const Permutation& perm) {
  if (static_cast<Eigen::Index>(perm.size()) != W.rows()) throw Error("permute_rows: permutation size mismatch");
  return W(perm, Eigen::all);
}

/// Candidate B_P = I - diag(P W)^{-1} P W with exact zero diagonal.
struct CandidateAdjacency {
  Eigen::MatrixXd B;
  Permutation permutation;
  double spectralRadius = 0.0;
};

/// Permutation maximizing sum_i log |(P W)_ii|, solved as a min-cost
/// assignment with cost -log |W(r, i)| and a prohibitive cost for entries
/// with |W(r, i)| <= eta. Throws NumericalError when every perfect matching
/// needs a sub-eta entry.
Permutation hungarian_admissible(const Eigen::MatrixXd& W, double eta);

/// Dense min-cost assignment (Kuhn-Munkres with potentials, O(d^3)).
/// Returns col_to_row: column j is matched with row col_to_row[j].
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

/// Largest dimension accepted by the admissible-permutation enumerators.
inline constexpr int kMaxEnumerationDim = 12;

/// Visits every admissible permutation (all |(P W)_ii| > eta) in
/// lexicographic order; the visitor returns false to stop early.
void for_each_admissible(const Eigen::MatrixXd& W, double eta, const std::function<bool(const Permutation&)>& visit);

std::vector<Permutation> enumerate_admissible(const Eigen::MatrixXd& W, double eta);

CandidateAdjacency b_from_w(const Eigen::MatrixXd& W, const Permutation& perm);

/// Zeroes every entry with |B_ij| < tau; entries equal to tau survive.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> threshold_entries(
    const Eigen::MatrixBase<Derived>& B, typename Derived::RealScalar tau) {
  using Scalar = typename Derived::Scalar;
  return B.unaryExpr([tau](Scalar b) { return std::abs(b) < tau ? Scalar(0) : b; });
}

/// Thresholded copy; spectralRadius is recomputed for the thresholded matrix.
CandidateAdjacency threshold(const CandidateAdjacency& candidate, double tau);

/// Index of the first candidate with spectral radius < 1, else of the
/// smallest spectral radius (earliest on ties).
std::size_t first_stable_index(std::span<const CandidateAdjacency> candidates);
const CandidateAdjacency& first_stable_select(std::span<const CandidateAdjacency> candidates);

enum class SelectionMode { Hungarian, EnumerateFirstStable };

std::string to_string(SelectionMode m);
SelectionMode selection_mode_from_string(const std::string& s);

struct RecoverOptions {
  double tau = 0.1;
  double eta = 1e-3;
  SelectionMode mode = SelectionMode::Hungarian;
  /// Enumeration mode only: W is row-normalized by its largest |entry| and
  /// entries below this fraction are treated as zero before enumerating.
  double enumerationPrune = 0.1;
  /// Enumeration mode only: candidates examined before falling back to the
  /// smallest spectral radius seen.
  std::size_t maxCandidates = 20000;
  IcaOptions ica;
};

struct StageTimings {
  double icaMs = 0.0;
  double assignMs = 0.0;
  double tarjanMs = 0.0;
  double totalMs = 0.0;
};

struct RecoveryResult {
  CandidateAdjacency bHat;  ///< after thresholding; spectralRadius of the thresholded B
  Condensation condensation;
  double tau = 0.0;
  double eta = 0.0;
  StageTimings timings;
  int icaIterations = 0;
  bool icaConverged = false;
  std::size_t candidatesExamined = 0;

  const Partition& partition() const { return condensation.partition; }
};

/// Condensation of supp(B) under the B(i, j) != 0 <=> j -> i convention.
Condensation condensation_of(const Eigen::MatrixXd& B);

/// Picks the candidate per `opts.mode` from a demixing matrix and thresholds it
/// at opts.tau. Stability in enumeration mode is judged on the thresholded
/// candidate.
CandidateAdjacency select_candidate(const Eigen::MatrixXd& W, const RecoverOptions& opts,
                                    std::size_t* examined = nullptr);

/// Permutation search, B_P, thresholding and condensation from a given W.
RecoveryResult recover_from_demixing(const Eigen::MatrixXd& W, const RecoverOptions& opts);

/// FastICA followed by recover_from_demixing.
RecoveryResult recover_condensation(const SampleMatrix& X, const RecoverOptions& opts = {});

nlohmann::json to_json(const RecoveryResult& r);

}  // namespace sccdag

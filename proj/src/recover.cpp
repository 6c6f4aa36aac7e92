#include "sccdag/recover.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace sccdag {

namespace {

constexpr double kProhibitiveCost = 1e12;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void check_square(const Eigen::MatrixXd& W, const char* who) {
  if (W.rows() != W.cols() || W.rows() == 0) throw Error(std::string(who) + ": expected a non-empty square matrix");
  if (!W.allFinite()) throw Error(std::string(who) + ": non-finite entry");
}

}  // namespace

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error("min_cost_assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; row_of[j] is the row matched to column j, 0 = none.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> row_of(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = row_of[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[ju];
        if (cur < minv[ju]) {
          minv[ju] = cur;
          way[ju] = j0;
        }
        if (minv[ju] < delta) {
          delta = minv[ju];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) {
          u[static_cast<std::size_t>(row_of[ju])] += delta;
          v[ju] -= delta;
        } else {
          minv[ju] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      row_of[static_cast<std::size_t>(j0)] = row_of[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_to_row(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) col_to_row[static_cast<std::size_t>(j - 1)] = row_of[static_cast<std::size_t>(j)] - 1;
  return col_to_row;
}

Permutation hungarian_admissible(const Eigen::MatrixXd& W, double eta) {
  check_square(W, "hungarian_admissible");
  if (!(eta > 0)) throw Error("hungarian_admissible: eta must be positive");
  const Eigen::MatrixXd cost =
      W.unaryExpr([eta](double w) { return std::abs(w) > eta ? -std::log(std::abs(w)) : kProhibitiveCost; });
  Permutation perm = min_cost_assignment(cost);
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (!(std::abs(W(perm[i], static_cast<Eigen::Index>(i))) > eta))
      throw NumericalError("hungarian_admissible: no admissible permutation (every matching uses an entry <= eta)");
  return perm;
}

void for_each_admissible(const Eigen::MatrixXd& W, double eta, const std::function<bool(const Permutation&)>& visit) {
  check_square(W, "enumerate_admissible");
  const int d = static_cast<int>(W.rows());
  if (d > kMaxEnumerationDim)
    throw Error("enumerate_admissible: d = " + std::to_string(d) + " exceeds the enumeration limit of " +
                std::to_string(kMaxEnumerationDim));
  Permutation perm(static_cast<std::size_t>(d), -1);
  std::vector<char> used(static_cast<std::size_t>(d), 0);
  bool stop = false;
  auto place = [&](auto&& self, int slot) -> void {
    if (slot == d) {
      stop = !visit(perm);
      return;
    }
    for (int r = 0; r < d && !stop; ++r) {
      if (used[static_cast<std::size_t>(r)] || !(std::abs(W(r, slot)) > eta)) continue;
      used[static_cast<std::size_t>(r)] = 1;
      perm[static_cast<std::size_t>(slot)] = r;
      self(self, slot + 1);
      used[static_cast<std::size_t>(r)] = 0;
    }
  };
  place(place, 0);
}

std::vector<Permutation> enumerate_admissible(const Eigen::MatrixXd& W, double eta) {
  std::vector<Permutation> out;
  for_each_admissible(W, eta, [&](const Permutation& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

CandidateAdjacency b_from_w(const Eigen::MatrixXd& W, const Permutation& perm) {
  check_square(W, "b_from_w");
  const Eigen::MatrixXd PW = permute_rows(W, perm);
  const Eigen::VectorXd diag = PW.diagonal();
  if ((diag.array() == 0.0).any()) throw NumericalError("b_from_w: zero on the diagonal of P W");
  CandidateAdjacency c;
  c.B = Eigen::MatrixXd::Identity(W.rows(), W.cols()) - diag.cwiseInverse().asDiagonal() * PW;
  c.B.diagonal().setZero();
  c.permutation = perm;
  c.spectralRadius = spectral_radius(c.B);
  return c;
}

CandidateAdjacency threshold(const CandidateAdjacency& candidate, double tau) {
  if (!(tau >= 0)) throw Error("threshold: tau must be non-negative");
  CandidateAdjacency out = candidate;
  out.B = threshold_entries(candidate.B, tau);
  out.spectralRadius = spectral_radius(out.B);
  return out;
}

std::size_t first_stable_index(std::span<const CandidateAdjacency> candidates) {
  if (candidates.empty()) throw Error("first_stable_select: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].spectralRadius < 1.0) return i;
    if (candidates[i].spectralRadius < candidates[best].spectralRadius) best = i;
  }
  return best;
}

const CandidateAdjacency& first_stable_select(std::span<const CandidateAdjacency> candidates) {
  return candidates[first_stable_index(candidates)];
}

std::string to_string(SelectionMode m) {
  return m == SelectionMode::Hungarian ? "hungarian" : "enumerate-first-stable";
}

SelectionMode selection_mode_from_string(const std::string& s) {
  if (s == "hungarian") return SelectionMode::Hungarian;
  if (s == "enumerate-first-stable" || s == "enumerate") return SelectionMode::EnumerateFirstStable;
  throw Error("unknown mode '" + s + "' (expected hungarian|enumerate-first-stable)");
}

Condensation condensation_of(const Eigen::MatrixXd& B) { return condense(support_graph(B)); }

CandidateAdjacency select_candidate(const Eigen::MatrixXd& W, const RecoverOptions& opts, std::size_t* examined) {
  std::size_t count = 0;
  CandidateAdjacency chosen;
  bool have = false;
  if (opts.mode == SelectionMode::EnumerateFirstStable) {
    Eigen::MatrixXd normalized = W;
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      const double scale = W.row(r).cwiseAbs().maxCoeff();
      if (scale > 0) normalized.row(r) /= scale;
    }
    // Streams the enumeration so the first stable candidate ends the search;
    // without one, the smallest spectral radius seen so far is kept.
    for_each_admissible(normalized, opts.enumerationPrune, [&](const Permutation& perm) {
      CandidateAdjacency c = threshold(b_from_w(W, perm), opts.tau);
      ++count;
      if (c.spectralRadius < 1.0) {
        chosen = std::move(c);
        have = true;
        return false;
      }
      if (!have || c.spectralRadius < chosen.spectralRadius) {
        chosen = std::move(c);
        have = true;
      }
      return count < opts.maxCandidates;
    });
  }
  if (!have) {
    chosen = threshold(b_from_w(W, hungarian_admissible(W, opts.eta)), opts.tau);
    ++count;
  }
  if (examined) *examined = count;
  return chosen;
}

RecoveryResult recover_from_demixing(const Eigen::MatrixXd& W, const RecoverOptions& opts) {
  if (!(opts.tau >= 0)) throw Error("recover: tau must be non-negative");
  if (!(opts.eta > 0)) throw Error("recover: eta must be positive");
  if (opts.maxCandidates == 0) throw Error("recover: maxCandidates must be positive");
  RecoveryResult r;
  r.tau = opts.tau;
  r.eta = opts.eta;

  auto t0 = Clock::now();
  r.bHat = select_candidate(W, opts, &r.candidatesExamined);
  r.timings.assignMs = elapsed_ms(t0);

  t0 = Clock::now();
  r.condensation = condensation_of(r.bHat.B);
  r.timings.tarjanMs = elapsed_ms(t0);
  r.timings.totalMs = r.timings.assignMs + r.timings.tarjanMs;
  return r;
}

RecoveryResult recover_condensation(const SampleMatrix& X, const RecoverOptions& opts) {
  const auto start = Clock::now();
  if (X.rows() <= X.cols()) throw Error("recover_condensation: need n > d");
  const DemixingEstimate est = fastica(X, opts.ica);
  const double ica_ms = elapsed_ms(start);

  RecoveryResult r = recover_from_demixing(est.W, opts);
  r.icaIterations = est.iterations;
  r.icaConverged = est.converged;
  r.timings.icaMs = ica_ms;
  r.timings.totalMs = elapsed_ms(start);
  return r;
}

nlohmann::json to_json(const RecoveryResult& r) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : r.condensation.clusterGraph.edges()) edges.push_back({a, b});
  return {{"partition", r.partition().labels()},
          {"clusterEdges", std::move(edges)},
          {"bHat", matrix_to_json(r.bHat.B)},
          {"permutation", r.bHat.permutation},
          {"spectralRadius", r.bHat.spectralRadius},
          {"tau", r.tau},
          {"eta", r.eta},
          {"timings",
           {{"ica_ms", r.timings.icaMs},
            {"assign_ms", r.timings.assignMs},
            {"tarjan_ms", r.timings.tarjanMs},
            {"total_ms", r.timings.totalMs}}},
          {"icaIterations", r.icaIterations},
          {"icaConverged", r.icaConverged}};
}

}  // namespace sccdag

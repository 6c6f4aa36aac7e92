#pragma once

// Independent brute-force reference implementations shared by the tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sccdag/graph.hpp"
#include "sccdag/rng.hpp"

namespace oracle {

using sccdag::DirectedGraph;
using sccdag::Edge;
using sccdag::Partition;

inline DirectedGraph random_graph(sccdag::Rng& rng, int d, double density) {
  std::vector<Edge> edges;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && rng.bernoulli(density)) edges.emplace_back(i, j);
  return DirectedGraph(d, std::move(edges));
}

inline Partition random_partition(sccdag::Rng& rng, int d) {
  const auto k = 1 + rng.below(static_cast<std::uint64_t>(d));
  std::vector<int> labels(static_cast<std::size_t>(d));
  for (int& l : labels) l = static_cast<int>(rng.below(k));
  return Partition(std::move(labels));
}

/// reach[i][j]: j reachable from i by a path of length >= 0 (Floyd-Warshall).
inline std::vector<std::vector<bool>> reachability(const DirectedGraph& g) {
  const int d = g.size();
  std::vector<std::vector<bool>> r(d, std::vector<bool>(d, false));
  for (int i = 0; i < d; ++i) r[i][i] = true;
  for (const auto& [a, b] : g.edges()) r[a][b] = true;
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

inline Partition scc_by_reachability(const DirectedGraph& g) {
  const auto r = reachability(g);
  const int d = g.size();
  std::vector<int> labels(d, -1);
  int next = 0;
  for (int i = 0; i < d; ++i) {
    if (labels[i] >= 0) continue;
    for (int j = i; j < d; ++j)
      if (r[i][j] && r[j][i]) labels[j] = next;
    ++next;
  }
  return Partition(std::move(labels));
}

/// Cycle check on the contracted graph via reachability between clusters.
inline bool quotient_is_acyclic(const DirectedGraph& g, const Partition& p) {
  const int k = p.cluster_count();
  std::vector<Edge> edges;
  for (const auto& [a, b] : g.edges())
    if (p[a] != p[b]) edges.emplace_back(p[a], p[b]);
  const auto r = reachability(DirectedGraph(k, std::move(edges)));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && r[i][j] && r[j][i]) return false;
  return true;
}

inline double ari_pair_counting(const Partition& a, const Partition& b) {
  const int n = a.size();
  double both = 0, in_a = 0, in_b = 0, total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      total += 1;
    }
  if (total == 0) return 1.0;
  const double expected = in_a * in_b / total;
  const double maximum = 0.5 * (in_a + in_b);
  if (maximum == expected) return 1.0;
  return (both - expected) / (maximum - expected);
}

inline double f1_direct(const std::vector<Edge>& pred, const std::vector<Edge>& truth) {
  double tp = 0, fp = 0, fn = 0;
  for (const auto& e : pred) (std::find(truth.begin(), truth.end(), e) != truth.end() ? tp : fp) += 1;
  for (const auto& e : truth) fn += std::find(pred.begin(), pred.end(), e) == pred.end();
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

inline double log_diag(const Eigen::MatrixXd& W, const std::vector<int>& perm) {
  double s = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) s += std::log(std::abs(W(perm[i], static_cast<Eigen::Index>(i))));
  return s;
}

/// max over admissible row permutations of sum_i log |W(perm[i], i)|.
inline std::optional<double> best_assignment(const Eigen::MatrixXd& W, double eta) {
  std::vector<int> perm(static_cast<std::size_t>(W.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<double> best;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size(); ++i) ok = ok && std::abs(W(perm[i], static_cast<Eigen::Index>(i))) > eta;
    if (!ok) continue;
    const double v = log_diag(W, perm);
    if (!best || v > *best) best = v;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// All admissible row permutations in lexicographic order.
inline std::vector<std::vector<int>> admissible_permutations(const Eigen::MatrixXd& W, double eta) {
  std::vector<int> perm(static_cast<std::size_t>(W.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size(); ++i) ok = ok && std::abs(W(perm[i], static_cast<Eigen::Index>(i))) > eta;
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace oracle

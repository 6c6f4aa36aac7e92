#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "sccdag/errors.hpp"

namespace sccdag {

/// Directed edge (src, dst).
using Edge = std::pair<int, int>;

/// Simple directed graph on nodes 0..d-1. Edges are kept sorted and unique;
/// self-loops are rejected.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(int d);
  DirectedGraph(int d, std::vector<Edge> edges);

  int size() const { return d_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(int src, int dst) const;
  void add_edge(int src, int dst);
  void remove_edge(int src, int dst);

  std::vector<std::vector<int>> successors() const;

  friend bool operator==(const DirectedGraph&, const DirectedGraph&) = default;

 private:
  void check_edge(int src, int dst) const;

  int d_ = 0;
  std::vector<Edge> edges_;
};

/// Node-to-cluster surjection in canonical form: labels are 0..k-1 and are
/// assigned in order of first appearance when scanning nodes 0..d-1.
class Partition {
 public:
  Partition() = default;
  /// Relabels `labels` canonically. Any integer labels are accepted.
  explicit Partition(std::vector<int> labels);

  static Partition singletons(int d);
  static Partition single_cluster(int d);

  int size() const { return static_cast<int>(labels_.size()); }
  int cluster_count() const { return k_; }
  int operator[](int node) const { return labels_[static_cast<std::size_t>(node)]; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<std::vector<int>> clusters() const;

  /// True when every cluster of *this lies inside one cluster of `coarser`.
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// SCC partition together with the DAG of inter-cluster edges.
struct Condensation {
  Partition partition;
  DirectedGraph clusterGraph;

  friend bool operator==(const Condensation&, const Condensation&) = default;
};

/// Strongly connected components (Tarjan, iterative), canonically labeled.
Partition tarjan_scc(const DirectedGraph& g);

/// Quotient graph over the clusters of `p`; intra-cluster edges are dropped.
DirectedGraph quotient(const DirectedGraph& g, const Partition& p);

bool is_dag(const DirectedGraph& g);

Condensation condense(const DirectedGraph& g);

/// Reachability graph. Reflexive pairs are omitted since self-loops are not
/// representable; this does not affect mutual reachability.
DirectedGraph transitive_closure(const DirectedGraph& g);

/// Reverses every edge of a simple directed cycle given as (v0, v1, ..., v0).
DirectedGraph reverse_cycle(const DirectedGraph& g, std::span<const int> cycle);

/// Elementary cycles of `g`, each written as (v0, ..., vk, v0) with v0 the
/// smallest node on the cycle. Stops after `limit` cycles.
std::vector<std::vector<int>> simple_cycles(const DirectedGraph& g, std::size_t limit);

/// Graph of nonzero off-diagonal entries: B(i, j) != 0 is the edge j -> i.
template <typename Derived>
DirectedGraph support_graph(const Eigen::MatrixBase<Derived>& B) {
  if (B.rows() != B.cols()) throw Error("support_graph: matrix must be square");
  const int d = static_cast<int>(B.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && B(i, j) != typename Derived::Scalar(0)) edges.emplace_back(j, i);
  return DirectedGraph(d, std::move(edges));
}

nlohmann::json to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Condensation& c);

}  // namespace sccdag

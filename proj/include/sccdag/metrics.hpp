#pragma once

#include <span>

#include <Eigen/Dense>

#include "sccdag/graph.hpp"

namespace sccdag {

struct MetricsReport {
  double ari = 0.0;
  double clusterDagF1 = 0.0;
  double variableF1 = 0.0;
  int hammingSupport = 0;
  int predictedPartitionSize = 0;
};

/// Hubert-Arabie adjusted Rand index. Returns 1 when the chance-corrected
/// denominator vanishes.
double ari(const Partition& pred, const Partition& truth);

/// Micro F1 = 2TP / (2TP + FP + FN) over directed pairs; 1 when both sets
/// are empty.
double edge_f1(std::span<const Edge> pred, std::span<const Edge> truth);

/// Projects `pred_support` onto the true partition and scores it against
/// the true condensation's cluster edges.
double cluster_dag_f1(const DirectedGraph& pred_support, const Partition& true_partition,
                      const Condensation& true_condensation);

/// Off-diagonal positions where exactly one of the two supports is nonzero.
int hamming_support(const Eigen::MatrixXd& b_hat, const Eigen::MatrixXd& b_true);

/// All metrics of a recovered (thresholded) B-hat and predicted partition
/// against the data-generating B.
MetricsReport evaluate(const Eigen::MatrixXd& b_hat, const Partition& predicted, const Eigen::MatrixXd& b_true);

}  // namespace sccdag

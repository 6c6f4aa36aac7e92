#include "sccdag/metrics.hpp"

#include <algorithm>
#include <iterator>
#include <vector>

namespace sccdag {

namespace {

double pairs(double m) { return m * (m - 1.0) / 2.0; }

std::vector<Edge> sorted_unique(std::span<const Edge> edges) {
  std::vector<Edge> out(edges.begin(), edges.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double ari(const Partition& pred, const Partition& truth) {
  if (pred.size() != truth.size()) throw Error("ari: partitions cover different node counts");
  const int n = pred.size();
  const int kp = pred.cluster_count(), kt = truth.cluster_count();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(kp, kt);
  for (int i = 0; i < n; ++i) table(pred[i], truth[i]) += 1.0;

  const double index = table.unaryExpr([](double m) { return pairs(m); }).sum();
  const double pred_pairs = table.rowwise().sum().unaryExpr([](double m) { return pairs(m); }).sum();
  const double truth_pairs = table.colwise().sum().unaryExpr([](double m) { return pairs(m); }).sum();
  const double total = pairs(n);
  if (total == 0.0) return 1.0;
  const double expected = pred_pairs * truth_pairs / total;
  const double maximum = 0.5 * (pred_pairs + truth_pairs);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

double edge_f1(std::span<const Edge> pred, std::span<const Edge> truth) {
  const auto p = sorted_unique(pred), t = sorted_unique(truth);
  if (p.empty() && t.empty()) return 1.0;
  std::vector<Edge> common;
  std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(common));
  const double tp = static_cast<double>(common.size());
  const double fp = static_cast<double>(p.size()) - tp;
  const double fn = static_cast<double>(t.size()) - tp;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

double cluster_dag_f1(const DirectedGraph& pred_support, const Partition& true_partition,
                      const Condensation& true_condensation) {
  if (true_condensation.partition.size() != true_partition.size() ||
      true_condensation.clusterGraph.size() != true_partition.cluster_count())
    throw Error("cluster_dag_f1: condensation does not match the true partition");
  const DirectedGraph projected = quotient(pred_support, true_partition);
  return edge_f1(projected.edges(), true_condensation.clusterGraph.edges());
}

int hamming_support(const Eigen::MatrixXd& b_hat, const Eigen::MatrixXd& b_true) {
  if (b_hat.rows() != b_true.rows() || b_hat.cols() != b_true.cols() || b_hat.rows() != b_hat.cols())
    throw Error("hamming_support: dimension mismatch");
  int count = 0;
  for (Eigen::Index i = 0; i < b_hat.rows(); ++i)
    for (Eigen::Index j = 0; j < b_hat.cols(); ++j)
      if (i != j && ((b_hat(i, j) != 0.0) != (b_true(i, j) != 0.0))) ++count;
  return count;
}

MetricsReport evaluate(const Eigen::MatrixXd& b_hat, const Partition& predicted, const Eigen::MatrixXd& b_true) {
  const DirectedGraph pred_support = support_graph(b_hat);
  const DirectedGraph true_support = support_graph(b_true);
  const Condensation truth = condense(true_support);
  MetricsReport m;
  m.ari = ari(predicted, truth.partition);
  m.clusterDagF1 = cluster_dag_f1(pred_support, truth.partition, truth);
  m.variableF1 = edge_f1(pred_support.edges(), true_support.edges());
  m.hammingSupport = hamming_support(b_hat, b_true);
  m.predictedPartitionSize = predicted.cluster_count();
  return m;
}

}  // namespace sccdag

#include "sccdag/lattice.hpp"

#include <algorithm>
#include <string>

namespace sccdag {

namespace {

void check_dim(int d, const char* who) {
  if (d < 0) throw Error(std::string(who) + ": negative dimension");
  if (d > kMaxLatticeDim)
    throw Error(std::string(who) + ": d = " + std::to_string(d) + " exceeds the lattice limit of " +
                std::to_string(kMaxLatticeDim));
}

}  // namespace

std::uint64_t bell_number(int d) {
  if (d < 0) throw Error("bell_number: negative argument");
  // Row r of the triangle starts with the last entry of row r-1; B_r is its first entry.
  std::vector<std::uint64_t> row{1};
  for (int r = 1; r <= d; ++r) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

std::vector<Partition> enumerate_partitions(int d) {
  check_dim(d, "enumerate_partitions");
  std::vector<Partition> out;
  if (d == 0) {
    out.emplace_back(std::vector<int>{});
    return out;
  }
  // a[i] <= 1 + max(a[0..i-1]), a[0] = 0.
  std::vector<int> a(static_cast<std::size_t>(d), 0);
  auto extend = [&](auto&& self, int i, int max_label) -> void {
    if (i == d) {
      out.emplace_back(a);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      a[static_cast<std::size_t>(i)] = l;
      self(self, i + 1, std::max(max_label, l));
    }
  };
  extend(extend, 1, 0);
  return out;
}

LatticeReport valid_dag_coarsenings(const DirectedGraph& g) {
  check_dim(g.size(), "valid_dag_coarsenings");
  LatticeReport report;
  report.d = g.size();
  report.sccFloor = tarjan_scc(g);
  report.partitionsByClusterCount.assign(static_cast<std::size_t>(g.size()) + 1, 0);
  report.validByClusterCount.assign(static_cast<std::size_t>(g.size()) + 1, 0);
  for (Partition& p : enumerate_partitions(g.size())) {
    ++report.totalPartitions;
    const auto k = static_cast<std::size_t>(p.cluster_count());
    ++report.partitionsByClusterCount[k];
    if (is_dag(quotient(g, p))) {
      ++report.validByClusterCount[k];
      report.validCoarsenings.push_back(std::move(p));
    }
  }
  return report;
}

bool verify_scc_floor(const DirectedGraph& g) {
  const LatticeReport report = valid_dag_coarsenings(g);
  bool floor_is_valid = false;
  for (const Partition& p : report.validCoarsenings) {
    if (!report.sccFloor.refines(p)) return false;
    floor_is_valid = floor_is_valid || p == report.sccFloor;
  }
  return floor_is_valid;
}

nlohmann::json to_json(const LatticeReport& report) {
  nlohmann::json valid = nlohmann::json::array();
  for (const auto& p : report.validCoarsenings) valid.push_back(p.labels());
  nlohmann::json by_k = nlohmann::json::array();
  for (std::size_t k = 1; k < report.partitionsByClusterCount.size(); ++k)
    by_k.push_back({{"clusters", k},
                    {"partitions", report.partitionsByClusterCount[k]},
                    {"valid", report.validByClusterCount[k]}});
  return {{"d", report.d},
          {"totalPartitions", report.totalPartitions},
          {"validCount", report.validCoarsenings.size()},
          {"validCoarsenings", std::move(valid)},
          {"sccFloor", report.sccFloor.labels()},
          {"byClusterCount", std::move(by_k)}};
}

}  // namespace sccdag

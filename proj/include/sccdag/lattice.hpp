#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "sccdag/graph.hpp"

namespace sccdag {

/// Largest node count the brute-force lattice routines accept (Bell(10) = 115975).
inline constexpr int kMaxLatticeDim = 10;

/// Bell numbers by the Bell-triangle recurrence.
std::uint64_t bell_number(int d);

/// Every set partition of {0..d-1} as a restricted growth string, in
/// lexicographic order of the strings.
std::vector<Partition> enumerate_partitions(int d);

struct LatticeReport {
  int d = 0;
  std::uint64_t totalPartitions = 0;
  std::vector<Partition> validCoarsenings;
  Partition sccFloor;
  /// Indexed by cluster count k (entry 0 unused).
  std::vector<std::uint64_t> partitionsByClusterCount;
  std::vector<std::uint64_t> validByClusterCount;
};

/// Partitions whose quotient of `g` is acyclic, plus the SCC floor.
LatticeReport valid_dag_coarsenings(const DirectedGraph& g);

/// Exhaustive check that every DAG-coarsening keeps each SCC in one cluster
/// and that the SCC partition is itself a DAG-coarsening.
bool verify_scc_floor(const DirectedGraph& g);

nlohmann::json to_json(const LatticeReport& report);

}  // namespace sccdag

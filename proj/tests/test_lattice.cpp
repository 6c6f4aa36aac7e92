#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "sccdag/lattice.hpp"

using namespace sccdag;

namespace {

// Bell numbers from B_{n+1} = sum_k C(n, k) B_k.
std::vector<std::uint64_t> bell_by_binomials(int upto) {
  std::vector<std::uint64_t> b{1};
  for (int n = 0; n < upto; ++n) {
    std::uint64_t sum = 0, c = 1;
    for (int k = 0; k <= n; ++k) {
      sum += c * b[static_cast<std::size_t>(k)];
      c = c * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
    }
    b.push_back(sum);
  }
  return b;
}

DirectedGraph example() { return DirectedGraph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 1}, {1, 4}}); }

}  // namespace

TEST_CASE("partition counts") {
  CHECK(enumerate_partitions(3).size() == 5);
  CHECK(enumerate_partitions(5).size() == 52);
  CHECK(enumerate_partitions(1).size() == 1);
  CHECK_THROWS_AS(enumerate_partitions(11), Error);
  const auto bell = bell_by_binomials(10);
  for (int d = 0; d <= 10; ++d) {
    CHECK(bell_number(d) == bell[static_cast<std::size_t>(d)]);
    CHECK(enumerate_partitions(d).size() == bell[static_cast<std::size_t>(d)]);
  }
}

TEST_CASE("enumerated partitions are distinct and canonical") {
  const auto parts = enumerate_partitions(6);
  std::set<std::vector<int>> seen;
  for (const auto& p : parts) {
    CHECK(Partition(p.labels()) == p);
    seen.insert(p.labels());
  }
  CHECK(seen.size() == parts.size());
}

TEST_CASE("example lattice") {
  const LatticeReport r = valid_dag_coarsenings(example());
  CHECK(r.totalPartitions == 52);
  REQUIRE(r.validCoarsenings.size() == 4);
  const std::vector<Partition> expected{Partition({0, 0, 0, 0, 0}), Partition({0, 1, 1, 1, 1}),
                                        Partition({0, 0, 0, 0, 1}), Partition({0, 1, 1, 1, 2})};
  for (const auto& p : expected)
    CHECK(std::find(r.validCoarsenings.begin(), r.validCoarsenings.end(), p) != r.validCoarsenings.end());
  CHECK(r.sccFloor == Partition({0, 1, 1, 1, 2}));
  CHECK(r.partitionsByClusterCount == std::vector<std::uint64_t>{0, 1, 15, 25, 10, 1});
  CHECK(verify_scc_floor(example()));
}

TEST_CASE("small lattices") {
  const DirectedGraph two(2, {{0, 1}, {1, 0}});
  const LatticeReport r = valid_dag_coarsenings(two);
  CHECK(r.totalPartitions == 2);
  CHECK(r.validCoarsenings.size() == 1);
  CHECK(r.validCoarsenings[0] == Partition::single_cluster(2));
  CHECK(verify_scc_floor(DirectedGraph(4)));
  const DirectedGraph dag(4, {{0, 1}, {1, 2}, {0, 3}});
  const auto dr = valid_dag_coarsenings(dag);
  CHECK(std::find(dr.validCoarsenings.begin(), dr.validCoarsenings.end(), Partition::singletons(4)) !=
        dr.validCoarsenings.end());
}

TEST_CASE("property: valid coarsenings are exactly the acyclic quotients above the floor") {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const int d = 3 + static_cast<int>(rng.below(4));
    const DirectedGraph g = oracle::random_graph(rng, d, rng.uniform(0.1, 0.5));
    const LatticeReport r = valid_dag_coarsenings(g);
    std::size_t count = 0;
    for (const auto& p : enumerate_partitions(d)) count += oracle::quotient_is_acyclic(g, p);
    CHECK(r.validCoarsenings.size() == count);
    for (const auto& p : r.validCoarsenings) REQUIRE(r.sccFloor.refines(p));
    CHECK(verify_scc_floor(g));
  }
}

TEST_CASE("lattice JSON") {
  const auto j = to_json(valid_dag_coarsenings(example()));
  CHECK(j["totalPartitions"] == 52);
  CHECK(j["validCount"] == 4);
  CHECK(j["sccFloor"] == nlohmann::json::array({0, 1, 1, 1, 2}));
}

#include "sccdag/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace sccdag {

DirectedGraph::DirectedGraph(int d) : d_(d) {
  if (d < 0) throw Error("DirectedGraph: negative node count");
}

DirectedGraph::DirectedGraph(int d, std::vector<Edge> edges) : DirectedGraph(d) {
  for (const auto& [src, dst] : edges) check_edge(src, dst);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
}

void DirectedGraph::check_edge(int src, int dst) const {
  if (src < 0 || src >= d_ || dst < 0 || dst >= d_)
    throw Error("DirectedGraph: edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                ") out of range for d = " + std::to_string(d_));
  if (src == dst) throw Error("DirectedGraph: self-loop on node " + std::to_string(src));
}

bool DirectedGraph::has_edge(int src, int dst) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{src, dst});
}

void DirectedGraph::add_edge(int src, int dst) {
  check_edge(src, dst);
  const Edge e{src, dst};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) edges_.insert(it, e);
}

void DirectedGraph::remove_edge(int src, int dst) {
  const Edge e{src, dst};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it != edges_.end() && *it == e) edges_.erase(it);
}

std::vector<std::vector<int>> DirectedGraph::successors() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(d_));
  for (const auto& [src, dst] : edges_) adj[static_cast<std::size_t>(src)].push_back(dst);
  return adj;
}

Partition::Partition(std::vector<int> labels) : labels_(std::move(labels)) {
  std::vector<std::pair<int, int>> seen;  // (raw label, canonical label)
  for (int& l : labels_) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == l; });
    if (it == seen.end()) {
      seen.emplace_back(l, k_);
      l = k_++;
    } else {
      l = it->second;
    }
  }
}

Partition Partition::singletons(int d) {
  std::vector<int> labels(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) labels[static_cast<std::size_t>(i)] = i;
  return Partition(std::move(labels));
}

Partition Partition::single_cluster(int d) {
  return Partition(std::vector<int>(static_cast<std::size_t>(d), 0));
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k_));
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>((*this)[i])].push_back(i);
  return out;
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.size() != size()) throw Error("Partition::refines: dimension mismatch");
  std::vector<int> image(static_cast<std::size_t>(k_), -1);
  for (int i = 0; i < size(); ++i) {
    int& target = image[static_cast<std::size_t>((*this)[i])];
    if (target == -1)
      target = coarser[i];
    else if (target != coarser[i])
      return false;
  }
  return true;
}

Partition tarjan_scc(const DirectedGraph& g) {
  const int d = g.size();
  const auto adj = g.successors();
  std::vector<int> index(static_cast<std::size_t>(d), -1), low(static_cast<std::size_t>(d), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(d), 0);
  std::vector<int> stack, component(static_cast<std::size_t>(d), -1);
  // explicit DFS frames: (node, next successor position)
  std::vector<std::pair<int, std::size_t>> frames;
  int counter = 0, components = 0;

  for (int root = 0; root < d; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      const auto vi = static_cast<std::size_t>(v);
      if (pos == 0 && index[vi] == -1) {
        index[vi] = low[vi] = counter++;
        stack.push_back(v);
        on_stack[vi] = 1;
      }
      if (pos < adj[vi].size()) {
        const int w = adj[vi][pos++];
        const auto wi = static_cast<std::size_t>(w);
        if (index[wi] == -1) {
          frames.emplace_back(w, 0);
        } else if (on_stack[wi]) {
          low[vi] = std::min(low[vi], index[wi]);
        }
        continue;
      }
      if (low[vi] == index[vi]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          component[static_cast<std::size_t>(w)] = components;
        } while (w != v);
        ++components;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const auto parent = static_cast<std::size_t>(frames.back().first);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
      }
    }
  }
  return Partition(std::move(component));
}

DirectedGraph quotient(const DirectedGraph& g, const Partition& p) {
  if (p.size() != g.size())
    throw Error("quotient: partition covers " + std::to_string(p.size()) + " nodes, graph has " +
                std::to_string(g.size()));
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& [u, v] : g.edges())
    if (p[u] != p[v]) edges.emplace_back(p[u], p[v]);
  return DirectedGraph(p.cluster_count(), std::move(edges));
}

bool is_dag(const DirectedGraph& g) {
  return tarjan_scc(g).cluster_count() == g.size();
}

Condensation condense(const DirectedGraph& g) {
  Partition p = tarjan_scc(g);
  DirectedGraph q = quotient(g, p);
  return {std::move(p), std::move(q)};
}

DirectedGraph transitive_closure(const DirectedGraph& g) {
  const int d = g.size();
  const auto adj = g.successors();
  std::vector<Edge> edges;
  std::vector<char> seen;
  std::queue<int> frontier;
  for (int s = 0; s < d; ++s) {
    seen.assign(static_cast<std::size_t>(d), 0);
    frontier.push(s);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        frontier.push(v);
      }
    }
    for (int v = 0; v < d; ++v)
      if (v != s && seen[static_cast<std::size_t>(v)]) edges.emplace_back(s, v);
  }
  return DirectedGraph(d, std::move(edges));
}

DirectedGraph reverse_cycle(const DirectedGraph& g, std::span<const int> cycle) {
  if (cycle.size() < 3 || cycle.front() != cycle.back())
    throw Error("reverse_cycle: cycle must list at least two nodes and repeat the first at the end");
  std::vector<int> nodes(cycle.begin(), cycle.end() - 1);
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw Error("reverse_cycle: cycle is not simple");
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
    if (!g.has_edge(cycle[i], cycle[i + 1]))
      throw Error("reverse_cycle: edge (" + std::to_string(cycle[i]) + ", " + std::to_string(cycle[i + 1]) +
                  ") is not in the graph");

  DirectedGraph out = g;
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) out.remove_edge(cycle[i], cycle[i + 1]);
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) out.add_edge(cycle[i + 1], cycle[i]);
  return out;
}

std::vector<std::vector<int>> simple_cycles(const DirectedGraph& g, std::size_t limit) {
  const auto adj = g.successors();
  const int d = g.size();
  std::vector<std::vector<int>> cycles;
  std::vector<int> path;
  std::vector<char> on_path(static_cast<std::size_t>(d), 0);

  // Backtracking restricted to nodes >= start, so each cycle is found once
  // from its smallest node.
  auto extend = [&](auto&& self, int start, int v) -> void {
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (cycles.size() >= limit) return;
      if (w == start) {
        cycles.push_back(path);
        cycles.back().push_back(start);
      } else if (w > start && !on_path[static_cast<std::size_t>(w)]) {
        on_path[static_cast<std::size_t>(w)] = 1;
        path.push_back(w);
        self(self, start, w);
        path.pop_back();
        on_path[static_cast<std::size_t>(w)] = 0;
      }
    }
  };
  for (int s = 0; s < d && cycles.size() < limit; ++s) {
    path.assign(1, s);
    on_path[static_cast<std::size_t>(s)] = 1;
    extend(extend, s, s);
    on_path[static_cast<std::size_t>(s)] = 0;
  }
  return cycles;
}

nlohmann::json to_json(const DirectedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return {{"d", g.size()}, {"edges", std::move(edges)}};
}

DirectedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("edges"))
    throw Error("graph JSON: expected {\"d\": int, \"edges\": [[src, dst], ...]}");
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw Error("graph JSON: each edge must be a [src, dst] pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return DirectedGraph(j.at("d").get<int>(), std::move(edges));
}

nlohmann::json to_json(const Condensation& c) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : c.clusterGraph.edges()) edges.push_back({a, b});
  return {{"partition", c.partition.labels()}, {"clusterEdges", std::move(edges)}};
}

}  // namespace sccdag

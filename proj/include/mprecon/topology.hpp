#pragma once

/// Communication topologies for the simulator: undirected graphs (gossip),
/// rooted trees with parties at the leaves, and the relay star.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mprecon/error.hpp"
#include "mprecon/rng.hpp"

namespace mprecon {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Undirected simple graph; vertex v hosts party party_vertex^-1(v) if any.
struct Graph {
  Adjacency adjacency;
  std::vector<std::uint32_t> party_vertex;

  std::size_t vertex_count() const { return adjacency.size(); }
  std::size_t edge_count() const {
    std::size_t deg = 0;
    for (const auto& a : adjacency) deg += a.size();
    return deg / 2;
  }
};

/// Rooted tree; parties sit at leaves (non-root vertices of degree 1).
struct RootedTree {
  Adjacency adjacency;
  std::uint32_t root = 0;
  std::vector<std::uint32_t> party_leaf;

  std::size_t edge_count() const { return adjacency.empty() ? 0 : adjacency.size() - 1; }
};

enum class RelayMode { wired, wireless };

using Topology = std::variant<RelayMode, RootedTree, Graph>;

inline Adjacency adjacency_from_edges(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  Adjacency adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) raise(Errc::invalid_argument, "edge endpoint out of range");
    if (u == v) raise(Errc::invalid_argument, "self loop");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end()) raise(Errc::invalid_argument, "duplicate edge");
  }
  return adj;
}

/// BFS distances from `src`; unreachable vertices get SIZE_MAX.
inline std::vector<std::size_t> bfs_distances(const Adjacency& adj, std::uint32_t src) {
  std::vector<std::size_t> dist(adj.size(), SIZE_MAX);
  std::queue<std::uint32_t> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (dist[v] == SIZE_MAX) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Adjacency& adj) {
  if (adj.empty()) return true;
  auto d = bfs_distances(adj, 0);
  return std::none_of(d.begin(), d.end(), [](std::size_t x) { return x == SIZE_MAX; });
}

inline std::vector<std::uint32_t> identity_parties(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

/// Checks acyclic + connected, and that parties are distinct leaves.
inline void validate_tree(const RootedTree& t) {
  const std::size_t n = t.adjacency.size();
  if (n < 2) raise(Errc::malformed_tree, "a tree needs a root and at least one leaf");
  if (t.root >= n) raise(Errc::malformed_tree, "root out of range");
  std::size_t deg = 0;
  for (const auto& a : t.adjacency) deg += a.size();
  if (deg != 2 * (n - 1) || !is_connected(t.adjacency)) raise(Errc::malformed_tree, "graph is not a tree");
  std::vector<bool> used(n, false);
  for (auto v : t.party_leaf) {
    if (v >= n || v == t.root || t.adjacency[v].size() != 1) raise(Errc::malformed_tree, "party not at a leaf");
    if (used[v]) raise(Errc::malformed_tree, "two parties share a leaf");
    used[v] = true;
  }
}

/// Longest leaf-to-root path length P.
inline std::size_t tree_height(const RootedTree& t) {
  auto d = bfs_distances(t.adjacency, t.root);
  return *std::max_element(d.begin(), d.end());
}

/// Root 0 with n leaves 1..n.
inline RootedTree star_tree(std::size_t n_leaves) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 1; i <= n_leaves; ++i) edges.emplace_back(0, i);
  RootedTree t{adjacency_from_edges(n_leaves + 1, edges), 0, {}};
  for (std::uint32_t i = 1; i <= n_leaves; ++i) t.party_leaf.push_back(i);
  return t;
}

/// Complete tree with the given branching and depth; parties at all leaves.
inline RootedTree complete_tree(std::size_t branching, std::size_t depth) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> frontier{0};
  std::uint32_t next = 1;
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<std::uint32_t> nxt;
    for (auto u : frontier) {
      for (std::size_t b = 0; b < branching; ++b) {
        edges.emplace_back(u, next);
        nxt.push_back(next++);
      }
    }
    frontier = std::move(nxt);
  }
  RootedTree t{adjacency_from_edges(next, edges), 0, frontier};
  return t;
}

/// Random rooted tree with n_leaves party leaves hanging off a random
/// recursive tree of internal vertices. Every internal vertex has a child.
inline RootedTree random_tree(std::size_t n_leaves, Rng& rng) {
  if (n_leaves == 0) raise(Errc::invalid_argument, "need at least one leaf");
  const std::size_t internal = std::max<std::size_t>(1, n_leaves / 3);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::size_t> children(internal, 0);
  for (std::uint32_t i = 1; i < internal; ++i) {
    auto parent = static_cast<std::uint32_t>(rng.below(i));
    edges.emplace_back(parent, i);
    ++children[parent];
  }
  RootedTree t;
  std::uint32_t next = static_cast<std::uint32_t>(internal);
  std::size_t placed = 0;
  for (std::uint32_t i = 0; i < internal && placed < n_leaves; ++i) {
    if (children[i] == 0) {
      edges.emplace_back(i, next);
      t.party_leaf.push_back(next++);
      ++placed;
    }
  }
  for (; placed < n_leaves; ++placed) {
    edges.emplace_back(static_cast<std::uint32_t>(rng.below(internal)), next);
    t.party_leaf.push_back(next++);
  }
  t.adjacency = adjacency_from_edges(next, edges);
  t.root = 0;
  validate_tree(t);
  return t;
}

/// 2 ln n / n, capped at 1.
inline double default_edge_prob(std::size_t n) {
  return std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
}

/// G(n, edge_prob), resampled until connected. Every vertex is a party.
inline Graph gen_gnp(std::size_t n, double edge_prob, std::uint64_t seed, std::size_t max_attempts = 1000) {
  if (n < 2) raise(Errc::invalid_argument, "G(n,p) needs n >= 2");
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = u + 1; v < n; ++v) {
        if (rng.chance(edge_prob)) edges.emplace_back(u, v);
      }
    }
    Adjacency adj = adjacency_from_edges(n, edges);
    if (is_connected(adj)) return Graph{std::move(adj), identity_parties(n)};
  }
  raise(Errc::disconnected_after_retries,
        "no connected sample of G(" + std::to_string(n) + ", " + std::to_string(edge_prob) + ") after " +
            std::to_string(max_attempts) + " attempts");
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph{adjacency_from_edges(n, edges), identity_parties(n)};
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return Graph{adjacency_from_edges(n, edges), identity_parties(n)};
}

// Topology files: a header line "n <count>", then one "u v" edge per line.
// Blank lines and lines starting with '#' are ignored.

inline Graph read_topology(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string tag;
      if (!(ls >> tag >> n) || tag != "n") raise(Errc::invalid_argument, "topology must start with 'n <count>'");
      have_header = true;
      continue;
    }
    std::uint32_t u = 0, v = 0;
    if (!(ls >> u >> v)) raise(Errc::invalid_argument, "bad edge line: " + line);
    edges.emplace_back(u, v);
  }
  if (!have_header) raise(Errc::invalid_argument, "empty topology");
  return Graph{adjacency_from_edges(n, edges), identity_parties(n)};
}

inline Graph read_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  return read_topology(in);
}

inline void write_topology(std::ostream& out, const Adjacency& adj) {
  out << "n " << adj.size() << '\n';
  for (std::uint32_t u = 0; u < adj.size(); ++u)
    for (auto v : adj[u])
      if (u < v) out << u << ' ' << v << '\n';
}

/// Rooted tree from a graph: parties are all leaves in ascending order.
inline RootedTree tree_from_graph(const Graph& g, std::uint32_t root) {
  RootedTree t{g.adjacency, root, {}};
  for (std::uint32_t v = 0; v < g.adjacency.size(); ++v) {
    if (v != root && g.adjacency[v].size() == 1) t.party_leaf.push_back(v);
  }
  validate_tree(t);
  return t;
}

}  // namespace mprecon

#pragma once

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ahpa/csv.hpp"
#include "ahpa/error.hpp"
#include "ahpa/matrix.hpp"

namespace ahpa {

using NodeId = int;

/// Absolute tolerance used for every distance and time comparison.
inline constexpr double kTolerance = 1e-9;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double length = 0.0;
};

/**
 * Connected, undirected, positively weighted graph of observation nodes.
 *
 * Node ids are dense 0..n-1. A PatrolGraph can only be obtained through
 * PatrolGraph::create (or parse_graph), both of which validate; it is
 * immutable afterwards.
 */
class PatrolGraph {
public:
  struct Neighbor {
    NodeId node;
    double length;
  };

  static PatrolGraph create(std::size_t node_count, std::vector<Edge> edges) {
    if (node_count == 0) throw ValidationError("graph has no nodes");
    PatrolGraph g;
    g.adjacency_.resize(node_count);
    std::set<std::pair<NodeId, NodeId>> seen;
    const auto n = static_cast<NodeId>(node_count);
    for (const auto& e : edges) {
      if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
        throw ValidationError("edge endpoint out of range: " + std::to_string(e.from) + "-" +
                              std::to_string(e.to));
      if (e.from == e.to) throw ValidationError("self-loop at node " + std::to_string(e.from));
      if (!(e.length > 0.0) || !std::isfinite(e.length))
        throw ValidationError("nonpositive edge length on " + std::to_string(e.from) + "-" +
                              std::to_string(e.to));
      auto key = std::minmax(e.from, e.to);
      if (!seen.insert(key).second)
        throw ValidationError("duplicate edge " + std::to_string(key.first) + "-" +
                              std::to_string(key.second));
      g.adjacency_[e.from].push_back({e.to, e.length});
      g.adjacency_[e.to].push_back({e.from, e.length});
    }
    for (auto& list : g.adjacency_)
      std::sort(list.begin(), list.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    g.edges_ = std::move(edges);
    if (!g.connected()) throw ValidationError("graph not connected");
    return g;
  }

  std::size_t node_count() const { return adjacency_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Neighbors of `v`, sorted by node id.
  const std::vector<Neighbor>& adjacent(NodeId v) const { return adjacency_[v]; }

  /// Length of edge (u, v); infinity if the nodes are not adjacent.
  double edge_length(NodeId u, NodeId v) const {
    for (const auto& nb : adjacency_[u])
      if (nb.node == v) return nb.length;
    return std::numeric_limits<double>::infinity();
  }

private:
  PatrolGraph() = default;

  bool connected() const {
    std::vector<char> seen(adjacency_.size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[v])
        if (!seen[nb.node]) {
          seen[nb.node] = 1;
          ++count;
          stack.push_back(nb.node);
        }
    }
    return count == adjacency_.size();
  }

  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<Edge> edges_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

} // namespace detail

/// Parses the line-oriented graph format: `n <count>`, then `e <i> <j> <length>` lines.
/// `#` starts a comment line; blank lines are ignored.
inline PatrolGraph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  long long node_count = -1;
  std::vector<Edge> edges;
  auto fail = [&](const std::string& what) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens[0] == "n") {
      if (node_count >= 0) fail("repeated node-count line");
      if (tokens.size() != 2 || !detail::parse_number(tokens[1], node_count) || node_count <= 0)
        fail("syntax error, expected `n <node-count>`");
    } else if (tokens[0] == "e") {
      if (node_count < 0) fail("edge before node-count line");
      Edge e;
      if (tokens.size() != 4 || !detail::parse_number(tokens[1], e.from) ||
          !detail::parse_number(tokens[2], e.to) || !detail::parse_number(tokens[3], e.length))
        fail("syntax error, expected `e <i> <j> <length>`");
      if (e.from < 0 || e.from >= node_count || e.to < 0 || e.to >= node_count)
        fail("node id out of range");
      if (!(e.length > 0.0)) fail("nonpositive edge length");
      edges.push_back(e);
    } else {
      fail("syntax error, unknown record `" + std::string(tokens[0]) + "`");
    }
  }
  if (node_count < 0) throw ValidationError("missing `n <node-count>` line");
  return PatrolGraph::create(static_cast<std::size_t>(node_count), std::move(edges));
}

/// Shortest-path lengths between all node pairs, plus path reconstruction.
class DistanceMatrix {
public:
  DistanceMatrix(const PatrolGraph& g, SquareMatrix dist) : graph_(&g), dist_(std::move(dist)) {}

  std::size_t size() const { return dist_.size(); }
  double operator()(NodeId i, NodeId j) const { return dist_(i, j); }
  const SquareMatrix& matrix() const { return dist_; }

  /// True if `t` lies on at least one shortest i-j path (the shortest-path DAG test).
  bool on_shortest_path(NodeId i, NodeId t, NodeId j) const {
    return std::abs(dist_(i, t) + dist_(t, j) - dist_(i, j)) <= kTolerance;
  }

  /// Canonical shortest path: the lexicographically smallest node sequence among all
  /// shortest i-j paths.
  std::vector<NodeId> shortest_path(NodeId i, NodeId j) const {
    std::vector<NodeId> path{i};
    NodeId u = i;
    while (u != j) {
      for (const auto& nb : graph_->adjacent(u)) {
        if (std::abs(nb.length + dist_(nb.node, j) - dist_(u, j)) <= kTolerance) {
          u = nb.node;
          break;
        }
      }
      path.push_back(u);
    }
    return path;
  }

private:
  const PatrolGraph* graph_;
  SquareMatrix dist_;
};

/// Single-source shortest-path lengths (binary-heap Dijkstra).
inline std::vector<double> dijkstra(const PatrolGraph& g, NodeId source) {
  std::vector<double> dist(g.node_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : g.adjacent(u)) {
      double nd = d + nb.length;
      if (nd < dist[nb.node]) {
        dist[nb.node] = nd;
        heap.emplace(nd, nb.node);
      }
    }
  }
  return dist;
}

/// All-pairs shortest paths via one Dijkstra per source. The returned matrix keeps a
/// reference to `g`, which must outlive it.
inline DistanceMatrix all_pairs_shortest_paths(const PatrolGraph& g) {
  const std::size_t n = g.node_count();
  SquareMatrix dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    auto row = dijkstra(g, static_cast<NodeId>(s));
    for (std::size_t t = 0; t < n; ++t) dist(s, t) = row[t];
  }
  // Symmetrize so that d(i,j) == d(j,i) bit-for-bit.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist(j, i) = dist(i, j) = std::min(dist(i, j), dist(j, i));
  return DistanceMatrix(g, std::move(dist));
}

/// Serializes a graph in the format accepted by parse_graph.
inline std::string to_graph_text(const PatrolGraph& g) {
  std::string out = "n " + std::to_string(g.node_count()) + "\n";
  for (const auto& e : g.edges())
    out += "e " + std::to_string(e.from) + " " + std::to_string(e.to) + " " +
           format_double(e.length) + "\n";
  return out;
}

} // namespace ahpa

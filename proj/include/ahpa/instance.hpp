#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "ahpa/fleet.hpp"
#include "ahpa/graph.hpp"

namespace ahpa {

/// Seeded random source with portable uniform draws (std distributions are
/// implementation-defined, these are not).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound).
  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(next() % bound); }
  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

private:
  std::mt19937_64 engine_;
};

/// Connected random graph: a random spanning tree plus `extra_edges` distinct chords,
/// lengths uniform in [min_length, max_length).
inline PatrolGraph random_connected_graph(Rng& rng, std::size_t n, std::size_t extra_edges,
                                          double min_length = 1.0, double max_length = 10.0) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> used;
  for (std::size_t k = 1; k < n; ++k) {
    NodeId a = perm[k], b = perm[rng.below(k)];
    used.insert(std::minmax(a, b));
    edges.push_back({a, b, rng.uniform(min_length, max_length)});
  }
  const std::size_t max_edges = n * (n - 1) / 2;
  const std::size_t target = std::min(max_edges, edges.size() + extra_edges);
  while (edges.size() < target) {
    auto a = static_cast<NodeId>(rng.below(n));
    auto b = static_cast<NodeId>(rng.below(n));
    if (a == b || !used.insert(std::minmax(a, b)).second) continue;
    edges.push_back({a, b, rng.uniform(min_length, max_length)});
  }
  return PatrolGraph::create(n, std::move(edges));
}

/// `count` distinct nodes drawn uniformly from 0..n-1, in draw order.
inline std::vector<NodeId> random_origins(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<NodeId> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t k = 0; k < count; ++k) std::swap(pool[k], pool[k + rng.below(n - k)]);
  pool.resize(count);
  return pool;
}

} // namespace ahpa

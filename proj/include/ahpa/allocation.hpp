#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "ahpa/csv.hpp"
#include "ahpa/error.hpp"
#include "ahpa/fleet.hpp"
#include "ahpa/graph.hpp"

namespace ahpa {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace detail

/// Rank of `agent` among agents tied at `node`; the lowest rank wins. The rank depends
/// only on (seed, node, agent), so removing a losing agent never changes the winner.
inline std::uint64_t tie_rank(std::uint64_t tie_seed, NodeId node, AgentId agent) {
  std::uint64_t h = detail::splitmix64(tie_seed);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(node));
  h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(agent) << 32));
  return h;
}

/// Alive agent minimizing cost(a, i, origin(a)); near-ties (within kTolerance) go to
/// the lowest tie_rank, then the lowest id.
inline AgentId optimal_agent(NodeId i, const Fleet& fleet, const CostMatrix& costs,
                             std::uint64_t tie_seed) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < fleet.size(); ++a) {
    const auto id = static_cast<AgentId>(a);
    if (fleet.alive(id)) best = std::min(best, costs(id, i, fleet[id].origin));
  }
  if (std::isinf(best)) throw ValidationError("no alive agent to assign node " + std::to_string(i));
  AgentId winner = -1;
  std::uint64_t winner_rank = 0;
  for (std::size_t a = 0; a < fleet.size(); ++a) {
    const auto id = static_cast<AgentId>(a);
    if (!fleet.alive(id) || costs(id, i, fleet[id].origin) > best + kTolerance) continue;
    const auto rank = tie_rank(tie_seed, i, id);
    if (winner < 0 || rank < winner_rank) {
      winner = id;
      winner_rank = rank;
    }
  }
  return winner;
}

/// Exactly-one allocation of nodes to agents, stored as an owner per node.
class Assignment {
public:
  Assignment() = default;
  Assignment(std::size_t agent_count, std::vector<AgentId> owner, std::uint64_t tie_seed = 0)
      : agent_count_(agent_count), owner_(std::move(owner)), tie_seed_(tie_seed) {
    for (auto a : owner_)
      if (a < 0 || static_cast<std::size_t>(a) >= agent_count_)
        throw ValidationError("assignment owner out of range: " + std::to_string(a));
  }

  std::size_t node_count() const { return owner_.size(); }
  std::size_t agent_count() const { return agent_count_; }
  std::uint64_t tie_seed() const { return tie_seed_; }

  AgentId owner(NodeId i) const { return owner_[i]; }
  const std::vector<AgentId>& owners() const { return owner_; }

  /// Binary indicator y(a, i).
  int y(AgentId a, NodeId i) const { return owner_[i] == a ? 1 : 0; }

  std::vector<NodeId> nodes_of(AgentId a) const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < owner_.size(); ++i)
      if (owner_[i] == a) out.push_back(static_cast<NodeId>(i));
    return out;
  }

  std::size_t count_of(AgentId a) const {
    return static_cast<std::size_t>(std::count(owner_.begin(), owner_.end(), a));
  }

  bool operator==(const Assignment& o) const {
    return agent_count_ == o.agent_count_ && owner_ == o.owner_;
  }

private:
  std::size_t agent_count_ = 0;
  std::vector<AgentId> owner_;
  std::uint64_t tie_seed_ = 0;
};

inline Assignment voronoi_partition(const PatrolGraph& g, const Fleet& fleet, const CostMatrix& costs,
                                    std::uint64_t tie_seed) {
  if (fleet.alive_count() == 0) throw ValidationError("voronoi partition needs an alive agent");
  std::vector<AgentId> owner(g.node_count());
  for (std::size_t i = 0; i < owner.size(); ++i)
    owner[i] = optimal_agent(static_cast<NodeId>(i), fleet, costs, tie_seed);
  return Assignment(fleet.size(), std::move(owner), tie_seed);
}

/// Symmetric, irreflexive relation over agents.
class NeighborRelation {
public:
  explicit NeighborRelation(std::size_t agent_count)
      : m_(agent_count), adjacent_(agent_count * agent_count, 0) {}

  std::size_t agent_count() const { return m_; }
  bool operator()(AgentId a, AgentId b) const { return adjacent_[a * m_ + b] != 0; }
  void set(AgentId a, AgentId b, bool value) {
    if (a == b) return;
    adjacent_[a * m_ + b] = adjacent_[b * m_ + a] = value ? 1 : 0;
  }

  std::set<AgentId> of(AgentId a) const {
    std::set<AgentId> out;
    for (std::size_t b = 0; b < m_; ++b)
      if ((*this)(a, static_cast<AgentId>(b))) out.insert(static_cast<AgentId>(b));
    return out;
  }

  bool operator==(const NeighborRelation&) const = default;

private:
  std::size_t m_;
  std::vector<char> adjacent_;
};

namespace detail {

/// True if every node on every shortest i-j path is owned by owner(i) or owner(j).
inline bool path_stays_within(const Assignment& assign, const DistanceMatrix& apsp, NodeId i, NodeId j) {
  const AgentId a = assign.owner(i);
  const AgentId b = assign.owner(j);
  for (std::size_t t = 0; t < assign.node_count(); ++t) {
    const auto owner = assign.owner(static_cast<NodeId>(t));
    if (owner != a && owner != b && apsp.on_shortest_path(i, static_cast<NodeId>(t), j)) return false;
  }
  return true;
}

} // namespace detail

/**
 * Voronoi neighbor relation between agents.
 *
 * Agents a and b are neighbors when their partitions meet: there is a node i owned by a
 * and a node j owned by b such that every node on every shortest i-j path belongs to a
 * or b. This is the relation under which losing one agent only changes the allocation
 * of that agent's neighbors (for equal speeds). See strict_neighbors for the variant
 * that quantifies over all node pairs.
 */
inline NeighborRelation neighbors(const Assignment& assign, const DistanceMatrix& apsp) {
  NeighborRelation rel(assign.agent_count());
  const auto n = static_cast<NodeId>(assign.node_count());
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      const AgentId a = assign.owner(i);
      const AgentId b = assign.owner(j);
      if (a == b || rel(a, b)) continue;
      if (detail::path_stays_within(assign, apsp, i, j)) rel.set(a, b, true);
    }
  return rel;
}

/// Agents a and b (both owning nodes) are related iff EVERY pair (i owned by a, j owned
/// by b) has all of its shortest paths inside the two partitions.
inline NeighborRelation strict_neighbors(const Assignment& assign, const DistanceMatrix& apsp) {
  const std::size_t m = assign.agent_count();
  std::vector<char> broken(m * m, 0);
  std::vector<char> seen(m * m, 0);
  const auto n = static_cast<NodeId>(assign.node_count());
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      const AgentId a = assign.owner(i);
      const AgentId b = assign.owner(j);
      if (a == b) continue;
      seen[a * m + b] = seen[b * m + a] = 1;
      if (broken[a * m + b]) continue;
      if (!detail::path_stays_within(assign, apsp, i, j)) broken[a * m + b] = broken[b * m + a] = 1;
    }
  NeighborRelation rel(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (seen[a * m + b] && !broken[a * m + b]) rel.set(static_cast<AgentId>(a), static_cast<AgentId>(b), true);
  return rel;
}

/// Full re-partition with `lost` marked dead. Returns the new assignment; `fleet` is the
/// fleet before the loss.
inline Assignment reallocate_after_attrition(const Assignment& assign, AgentId lost, const PatrolGraph& g,
                                             const Fleet& fleet, const CostMatrix& costs,
                                             std::uint64_t tie_seed) {
  if (lost < 0 || static_cast<std::size_t>(lost) >= fleet.size())
    throw ValidationError("unknown agent " + std::to_string(lost));
  if (!fleet.alive(lost)) throw ValidationError("agent " + std::to_string(lost) + " already dead");
  if (assign.agent_count() != fleet.size())
    throw ValidationError("assignment and fleet disagree on agent count");
  return voronoi_partition(g, fleet.without(lost), costs, tie_seed);
}

/// Agents whose assigned node set differs between two assignments of the same nodes.
inline std::set<AgentId> changed_agents(const Assignment& before, const Assignment& after) {
  if (before.node_count() != after.node_count())
    throw ValidationError("assignments cover different node sets");
  std::set<AgentId> out;
  for (std::size_t i = 0; i < before.node_count(); ++i) {
    const auto a = before.owner(static_cast<NodeId>(i));
    const auto b = after.owner(static_cast<NodeId>(i));
    if (a != b) {
      out.insert(a);
      out.insert(b);
    }
  }
  return out;
}

inline std::string assignment_to_csv(const Assignment& assign) {
  std::string out = "node,agent\n";
  for (std::size_t i = 0; i < assign.node_count(); ++i)
    out += std::to_string(i) + "," + std::to_string(assign.owner(static_cast<NodeId>(i))) + "\n";
  return out;
}

inline Assignment assignment_from_csv(std::string_view text, std::size_t agent_count) {
  auto table = parse_csv(text);
  if (table.header != std::vector<std::string>{"node", "agent"})
    throw ValidationError("assignment csv must have header `node,agent`");
  std::vector<AgentId> owner(table.rows.size(), -1);
  for (const auto& row : table.rows) {
    const auto node = parse_int(row[0]);
    if (node < 0 || static_cast<std::size_t>(node) >= owner.size() || owner[node] != -1)
      throw ValidationError("assignment csv has bad node id " + row[0]);
    owner[node] = static_cast<AgentId>(parse_int(row[1]));
  }
  return Assignment(agent_count, std::move(owner));
}

inline std::string neighbors_to_csv(const NeighborRelation& rel) {
  std::string out = "agent_a,agent_b\n";
  for (std::size_t a = 0; a < rel.agent_count(); ++a)
    for (std::size_t b = a + 1; b < rel.agent_count(); ++b)
      if (rel(static_cast<AgentId>(a), static_cast<AgentId>(b)))
        out += std::to_string(a) + "," + std::to_string(b) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Multiplicatively weighted Voronoi cells on the real line.

struct LineAgent {
  double position = 0.0;
  double speed = 1.0;
};

/// Maximal interval (lo, hi] owned by one agent; the leftmost interval is (-inf, hi].
struct LineInterval {
  double lo = 0.0;
  double hi = 0.0;
  AgentId owner = 0;
};

inline double line_time(const LineAgent& agent, double x) {
  return std::abs(x - agent.position) / agent.speed;
}

/// Owner of point `x` among agents with alive[a] set; strict minimum time, exact ties
/// to the lowest id. An empty `alive` means all agents are alive.
inline AgentId line_owner_at(double x, const std::vector<LineAgent>& agents,
                             const std::vector<bool>& alive = {}) {
  AgentId best = -1;
  double best_time = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (!alive.empty() && !alive[a]) continue;
    const double t = line_time(agents[a], x);
    if (t < best_time) {
      best_time = t;
      best = static_cast<AgentId>(a);
    }
  }
  if (best < 0) throw ValidationError("no alive agent on the line");
  return best;
}

/**
 * Exact owner intervals of the line under the time metric |x - p_a| / s_a.
 *
 * Every owner change happens at a root of |x - p_a| / s_a = |x - p_b| / s_b for some
 * pair, and each pair has at most two roots (the internal and, for unequal speeds,
 * the external divider). Owners are constant between consecutive roots, so one probe per
 * gap identifies them. Intervals are left-open and right-closed, which places a tied
 * boundary point with the interval on its left.
 */
inline std::vector<LineInterval> mw_voronoi_line(const std::vector<LineAgent>& agents) {
  if (agents.empty()) throw ValidationError("mw_voronoi_line needs at least one agent");
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (!(agents[a].speed > 0.0)) throw ValidationError("nonpositive speed on the line");
    for (std::size_t b = a + 1; b < agents.size(); ++b)
      if (agents[a].position == agents[b].position)
        throw ValidationError("duplicate agent position " + format_double(agents[a].position));
  }
  std::vector<double> roots;
  for (std::size_t a = 0; a < agents.size(); ++a)
    for (std::size_t b = a + 1; b < agents.size(); ++b) {
      const double pa = agents[a].position, pb = agents[b].position;
      const double wa = 1.0 / agents[a].speed, wb = 1.0 / agents[b].speed;
      // (x - pa) wa = (pb - x) wb
      roots.push_back((pa * wa + pb * wb) / (wa + wb));
      // (x - pa) wa = (x - pb) wb
      if (agents[a].speed != agents[b].speed) roots.push_back((pa * wa - pb * wb) / (wa - wb));
    }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

  // Probe each open gap between consecutive roots.
  std::vector<double> cuts;
  cuts.push_back(-std::numeric_limits<double>::infinity());
  cuts.insert(cuts.end(), roots.begin(), roots.end());
  cuts.push_back(std::numeric_limits<double>::infinity());
  std::vector<LineInterval> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    double probe;
    if (std::isinf(lo) && std::isinf(hi)) probe = agents.front().position;
    else if (std::isinf(lo)) probe = hi - 1.0;
    else if (std::isinf(hi)) probe = lo + 1.0;
    else probe = 0.5 * (lo + hi);
    const AgentId owner = line_owner_at(probe, agents);
    if (!out.empty() && out.back().owner == owner) out.back().hi = hi;
    else out.push_back({lo, hi, owner});
  }
  return out;
}

inline std::string intervals_to_csv(const std::vector<LineInterval>& intervals) {
  std::string out = "lo,hi,agent\n";
  for (const auto& iv : intervals)
    out += format_double(iv.lo) + "," + format_double(iv.hi) + "," + std::to_string(iv.owner) + "\n";
  return out;
}

} // namespace ahpa

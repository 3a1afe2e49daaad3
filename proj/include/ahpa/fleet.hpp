#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "ahpa/error.hpp"
#include "ahpa/graph.hpp"
#include "ahpa/matrix.hpp"

namespace ahpa {

using AgentId = int;

struct AgentSpec {
  NodeId origin = 0;
  double speed = 1.0;
  bool alive = true;
};

/// Agents indexed 0..m-1 by position. Origins are distinct and speeds positive.
class Fleet {
public:
  Fleet() = default;
  explicit Fleet(std::vector<AgentSpec> agents) : agents_(std::move(agents)) {
    std::set<NodeId> origins;
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      if (!(agents_[a].speed > 0.0))
        throw ValidationError("agent " + std::to_string(a) + " has nonpositive speed");
      if (!origins.insert(agents_[a].origin).second)
        throw ValidationError("duplicate origin node " + std::to_string(agents_[a].origin));
    }
  }

  /// Homogeneous fleet with unit speed.
  static Fleet at_origins(const std::vector<NodeId>& origins) {
    std::vector<AgentSpec> agents;
    for (NodeId o : origins) agents.push_back({o, 1.0, true});
    return Fleet(std::move(agents));
  }

  std::size_t size() const { return agents_.size(); }
  const AgentSpec& operator[](AgentId a) const { return agents_[a]; }
  const std::vector<AgentSpec>& agents() const { return agents_; }

  bool alive(AgentId a) const { return agents_[a].alive; }
  std::size_t alive_count() const {
    std::size_t c = 0;
    for (const auto& a : agents_) c += a.alive ? 1 : 0;
    return c;
  }
  std::vector<AgentId> alive_agents() const {
    std::vector<AgentId> out;
    for (std::size_t a = 0; a < agents_.size(); ++a)
      if (agents_[a].alive) out.push_back(static_cast<AgentId>(a));
    return out;
  }

  bool homogeneous() const {
    for (const auto& a : agents_)
      if (a.speed != agents_.front().speed) return false;
    return true;
  }

  /// Copy of this fleet with agent `a` marked dead.
  Fleet without(AgentId a) const {
    if (a < 0 || static_cast<std::size_t>(a) >= agents_.size())
      throw ValidationError("unknown agent " + std::to_string(a));
    if (!agents_[a].alive) throw ValidationError("agent " + std::to_string(a) + " already dead");
    Fleet copy = *this;
    copy.agents_[a].alive = false;
    return copy;
  }

  /// Throws unless every origin is a node of a graph with `node_count` nodes.
  void check_against(std::size_t node_count) const {
    for (std::size_t a = 0; a < agents_.size(); ++a)
      if (agents_[a].origin < 0 || static_cast<std::size_t>(agents_[a].origin) >= node_count)
        throw ValidationError("agent " + std::to_string(a) + " origin out of range");
  }

private:
  std::vector<AgentSpec> agents_;
};

/// Per-agent travel times in seconds: cost(a, i, j) = d(i, j) / speed(a).
class CostMatrix {
public:
  CostMatrix() = default;
  explicit CostMatrix(std::vector<SquareMatrix> per_agent) : per_agent_(std::move(per_agent)) {}

  std::size_t agent_count() const { return per_agent_.size(); }
  std::size_t node_count() const { return per_agent_.empty() ? 0 : per_agent_.front().size(); }
  double operator()(AgentId a, NodeId i, NodeId j) const { return per_agent_[a](i, j); }
  const SquareMatrix& of(AgentId a) const { return per_agent_[a]; }

private:
  std::vector<SquareMatrix> per_agent_;
};

inline CostMatrix travel_costs(const DistanceMatrix& d, const Fleet& fleet) {
  const std::size_t n = d.size();
  std::vector<SquareMatrix> per_agent;
  per_agent.reserve(fleet.size());
  for (std::size_t a = 0; a < fleet.size(); ++a) {
    const double speed = fleet[static_cast<AgentId>(a)].speed;
    if (!(speed > 0.0)) throw ValidationError("agent " + std::to_string(a) + " has nonpositive speed");
    SquareMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = d(static_cast<NodeId>(i), static_cast<NodeId>(j)) / speed;
    per_agent.push_back(std::move(c));
  }
  return CostMatrix(std::move(per_agent));
}

} // namespace ahpa

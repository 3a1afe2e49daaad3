#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "ahpa/allocation.hpp"
#include "ahpa/error.hpp"
#include "ahpa/fleet.hpp"
#include "ahpa/graph.hpp"
#include "ahpa/routing.hpp"

namespace ahpa {

inline constexpr std::size_t kOracleMaxNodes = 8;
inline constexpr std::size_t kOracleMaxAgents = 6;

/// Assignment plus one closed route per alive agent, scored by average idleness.
struct Solution {
  Assignment assignment;
  std::vector<Route> routes;
  double objective = 0.0;
};

/// Average idleness z = (1/n) * sum over routes of cycle_time * (nodes assigned to that agent).
/// Each route must visit exactly the nodes its agent owns.
inline double evaluate_objective(const Assignment& assignment, const std::vector<Route>& routes,
                                 std::size_t n) {
  if (assignment.node_count() != n) throw ValidationError("assignment does not cover all nodes");
  std::vector<int> covered(n, 0);
  double total = 0.0;
  for (const auto& r : routes) {
    auto owned = assignment.nodes_of(r.agent);
    std::vector<NodeId> visited = r.order;
    std::sort(visited.begin(), visited.end());
    if (std::adjacent_find(visited.begin(), visited.end()) != visited.end())
      throw ValidationError("route of agent " + std::to_string(r.agent) + " repeats a node");
    if (!owned.empty() && visited != owned)
      throw ValidationError("route of agent " + std::to_string(r.agent) + " differs from its assignment");
    for (NodeId v : owned) ++covered[v];
    total += r.cycle_time * static_cast<double>(owned.size());
  }
  for (std::size_t i = 0; i < n; ++i)
    if (covered[i] != 1)
      throw ValidationError("node " + std::to_string(i) + " covered by " + std::to_string(covered[i]) +
                            " routes");
  return total / static_cast<double>(n);
}

/// The heuristic solution: Voronoi allocation, then a nearest-neighbor tour per agent.
inline Solution ahpa_solution(const PatrolGraph& g, const Fleet& fleet, const CostMatrix& costs,
                              std::uint64_t tie_seed) {
  Solution s;
  s.assignment = voronoi_partition(g, fleet, costs, tie_seed);
  for (AgentId a : fleet.alive_agents()) {
    auto nodes = s.assignment.nodes_of(a);
    s.routes.push_back(nn_tour(a, nodes, fleet[a].origin, costs.of(a)));
  }
  s.objective = evaluate_objective(s.assignment, s.routes, g.node_count());
  return s;
}

/**
 * Globally optimal average-idleness solution by exhaustive enumeration.
 *
 * Each alive agent keeps its own origin (the closed cycle starts there), and every other
 * node goes to exactly one alive agent. All m^(n - m) assignments are scored with exact
 * tours, memoized per (agent, subset). Among equal objectives the lexicographically
 * smallest owner vector wins.
 */
inline Solution solve_centralized(const PatrolGraph& g, const Fleet& fleet, const CostMatrix& costs) {
  const std::size_t n = g.node_count();
  const auto alive = fleet.alive_agents();
  if (alive.empty()) throw ValidationError("all agents are dead");
  if (n > kOracleMaxNodes)
    throw CapExceeded("oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes, got " +
                      std::to_string(n));
  if (alive.size() > kOracleMaxAgents)
    throw CapExceeded("oracle limited to " + std::to_string(kOracleMaxAgents) + " agents, got " +
                      std::to_string(alive.size()));
  fleet.check_against(n);

  std::vector<AgentId> fixed(n, -1);
  for (AgentId a : alive) fixed[fleet[a].origin] = a;
  std::vector<NodeId> free_nodes;
  for (std::size_t i = 0; i < n; ++i)
    if (fixed[i] < 0) free_nodes.push_back(static_cast<NodeId>(i));
  const std::size_t f = free_nodes.size();
  const std::size_t subsets = std::size_t{1} << f;

  // memo[k][mask]: exact cycle time of alive[k] over its origin plus free nodes in mask.
  std::vector<std::vector<double>> memo(alive.size(), std::vector<double>(subsets, -1.0));
  auto tour_cost = [&](std::size_t k, std::size_t mask) {
    double& slot = memo[k][mask];
    if (slot < 0.0) {
      std::vector<NodeId> stops;
      for (std::size_t b = 0; b < f; ++b)
        if (mask & (std::size_t{1} << b)) stops.push_back(free_nodes[b]);
      slot = exact_tour(alive[k], stops, fleet[alive[k]].origin, costs.of(alive[k])).cycle_time;
    }
    return slot;
  };

  // Odometer over free nodes; digit 0 is the most significant, so owner vectors are
  // visited in lexicographic order.
  std::vector<std::size_t> digit(f, 0);
  std::vector<std::size_t> best_digit;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> masks(alive.size());
  while (true) {
    std::fill(masks.begin(), masks.end(), 0);
    for (std::size_t b = 0; b < f; ++b) masks[digit[b]] |= std::size_t{1} << b;
    double total = 0.0;
    for (std::size_t k = 0; k < alive.size(); ++k)
      total += tour_cost(k, masks[k]) * static_cast<double>(1 + std::popcount(masks[k]));
    const double z = total / static_cast<double>(n);
    if (z < best - kTolerance) {
      best = z;
      best_digit = digit;
    }
    bool done = true;
    for (std::size_t pos = f; pos-- > 0;) {
      if (++digit[pos] < alive.size()) {
        done = false;
        break;
      }
      digit[pos] = 0;
    }
    if (done) break;
  }

  std::vector<AgentId> owner = fixed;
  for (std::size_t b = 0; b < f; ++b) owner[free_nodes[b]] = alive[best_digit[b]];
  Solution s;
  s.assignment = Assignment(fleet.size(), std::move(owner));
  for (AgentId a : alive)
    s.routes.push_back(exact_tour(a, s.assignment.nodes_of(a), fleet[a].origin, costs.of(a)));
  s.objective = evaluate_objective(s.assignment, s.routes, n);
  return s;
}

/// Optimal solution with the agents in `dead` excluded from assignment and routing.
inline Solution solve_with_attrition(const PatrolGraph& g, const Fleet& fleet, const CostMatrix& costs,
                                     const std::set<AgentId>& dead) {
  Fleet remaining = fleet;
  for (AgentId a : dead)
    if (remaining.alive(a)) remaining = remaining.without(a);
  if (remaining.alive_count() == 0) throw ValidationError("all agents are dead");
  return solve_centralized(g, remaining, costs);
}

/// heuristic.objective / optimal.objective. Both zero counts as ratio 1.
inline double approximation_ratio(const Solution& heuristic, const Solution& optimal) {
  if (optimal.objective <= kTolerance) {
    if (heuristic.objective <= kTolerance) return 1.0;
    throw ValidationError("optimal objective is zero but heuristic objective is " +
                          format_double(heuristic.objective));
  }
  return heuristic.objective / optimal.objective;
}

inline std::string objective_to_csv(double objective) {
  return "objective," + format_double(objective) + "\n";
}

} // namespace ahpa

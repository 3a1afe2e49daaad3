#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ahpa/csv.hpp"
#include "ahpa/error.hpp"
#include "ahpa/fleet.hpp"
#include "ahpa/matrix.hpp"

namespace ahpa {

/// Maximum number of stops (besides the start node) accepted by exact_tour.
inline constexpr std::size_t kExactTourCap = 14;

/**
 * Closed patrol tour. order[0] is the start node; the return leg from order.back()
 * to order[0] is implied. visit_times[k] is the arrival time at order[k] measured from
 * departure, so visit_times[0] == 0, and cycle_time includes the return leg.
 */
struct Route {
  AgentId agent = 0;
  std::vector<NodeId> order;
  std::vector<double> visit_times;
  double cycle_time = 0.0;

  NodeId start() const { return order.front(); }
  std::size_t stops() const { return order.size(); }
};

/// Sum of consecutive leg costs including the return leg to the start.
inline double cycle_time(const Route& route, const SquareMatrix& cost) {
  if (route.order.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < route.order.size(); ++k) total += cost(route.order[k], route.order[k + 1]);
  return total + cost(route.order.back(), route.order.front());
}

namespace detail {

inline Route make_route(AgentId agent, std::vector<NodeId> order, const SquareMatrix& cost) {
  Route r;
  r.agent = agent;
  r.visit_times.reserve(order.size());
  double t = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0) t += cost(order[k - 1], order[k]);
    r.visit_times.push_back(t);
  }
  r.order = std::move(order);
  r.cycle_time = r.order.size() < 2 ? 0.0 : t + cost(r.order.back(), r.order.front());
  return r;
}

/// Sorted distinct stops of `assigned` other than `origin`.
inline std::vector<NodeId> stops_excluding(std::span<const NodeId> assigned, NodeId origin) {
  std::vector<NodeId> stops;
  for (NodeId v : assigned)
    if (v != origin) stops.push_back(v);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  return stops;
}

} // namespace detail

/// Nearest-neighbor tour from `origin` over `assigned`; equally near candidates go to the
/// lowest node id. An empty set yields the one-node route at `origin` with cycle time 0.
inline Route nn_tour(AgentId agent, std::span<const NodeId> assigned, NodeId origin,
                     const SquareMatrix& cost) {
  auto remaining = detail::stops_excluding(assigned, origin);
  std::vector<NodeId> order{origin};
  order.reserve(remaining.size() + 1);
  std::vector<char> used(remaining.size(), 0);
  NodeId here = origin;
  for (std::size_t step = 0; step < remaining.size(); ++step) {
    std::size_t pick = remaining.size();
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      if (used[k]) continue;
      // remaining is sorted, so strict < keeps the lowest id among near-equal candidates
      if (pick == remaining.size() || cost(here, remaining[k]) < cost(here, remaining[pick]) - kTolerance)
        pick = k;
    }
    used[pick] = 1;
    here = remaining[pick];
    order.push_back(here);
  }
  return detail::make_route(agent, std::move(order), cost);
}

/// Minimum-cycle-time tour by dynamic programming over subsets of stops.
inline Route exact_tour(AgentId agent, std::span<const NodeId> assigned, NodeId origin,
                        const SquareMatrix& cost) {
  const auto stops = detail::stops_excluding(assigned, origin);
  const std::size_t k = stops.size();
  if (k > kExactTourCap)
    throw CapExceeded("exact tour limited to " + std::to_string(kExactTourCap) + " stops, got " +
                      std::to_string(k));
  if (k == 0) return detail::make_route(agent, {origin}, cost);

  const std::size_t full = (std::size_t{1} << k) - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // best[mask][last]: shortest path from origin through exactly `mask`, ending at stop `last`.
  std::vector<double> best((full + 1) * k, inf);
  std::vector<std::int8_t> parent((full + 1) * k, -1);
  for (std::size_t j = 0; j < k; ++j) best[(std::size_t{1} << j) * k + j] = cost(origin, stops[j]);
  for (std::size_t mask = 1; mask <= full; ++mask)
    for (std::size_t last = 0; last < k; ++last) {
      const double here = best[mask * k + last];
      if (!(mask & (std::size_t{1} << last)) || here == inf) continue;
      for (std::size_t next = 0; next < k; ++next) {
        if (mask & (std::size_t{1} << next)) continue;
        const std::size_t to = (mask | (std::size_t{1} << next)) * k + next;
        const double cand = here + cost(stops[last], stops[next]);
        if (cand < best[to]) {
          best[to] = cand;
          parent[to] = static_cast<std::int8_t>(last);
        }
      }
    }
  std::size_t last = 0;
  double total = inf;
  for (std::size_t j = 0; j < k; ++j) {
    const double cand = best[full * k + j] + cost(stops[j], origin);
    if (cand < total) {
      total = cand;
      last = j;
    }
  }
  std::vector<NodeId> reversed;
  std::size_t mask = full;
  auto cur = static_cast<std::int8_t>(last);
  while (cur >= 0) {
    reversed.push_back(stops[static_cast<std::size_t>(cur)]);
    const auto prev = parent[mask * k + static_cast<std::size_t>(cur)];
    mask &= ~(std::size_t{1} << static_cast<std::size_t>(cur));
    cur = prev;
  }
  std::vector<NodeId> order{origin};
  order.insert(order.end(), reversed.rbegin(), reversed.rend());
  return detail::make_route(agent, std::move(order), cost);
}

inline std::string routes_to_csv(const std::vector<Route>& routes) {
  std::string out = "agent,seq,node,visit_time\n";
  for (const auto& r : routes)
    for (std::size_t k = 0; k < r.order.size(); ++k)
      out += std::to_string(r.agent) + "," + std::to_string(k) + "," + std::to_string(r.order[k]) + "," +
             format_double(r.visit_times[k]) + "\n";
  return out;
}

/// Parses route rows back into per-agent routes (cycle_time is recomputed from `costs`).
inline std::vector<Route> routes_from_csv(std::string_view text, const CostMatrix& costs) {
  auto table = parse_csv(text);
  if (table.header != std::vector<std::string>{"agent", "seq", "node", "visit_time"})
    throw ValidationError("route csv must have header `agent,seq,node,visit_time`");
  std::map<AgentId, Route> by_agent;
  for (const auto& row : table.rows) {
    const auto agent = static_cast<AgentId>(parse_int(row[0]));
    auto& r = by_agent[agent];
    r.agent = agent;
    if (static_cast<std::size_t>(parse_int(row[1])) != r.order.size())
      throw ValidationError("route csv rows out of sequence for agent " + row[0]);
    r.order.push_back(static_cast<NodeId>(parse_int(row[2])));
    r.visit_times.push_back(parse_double(row[3]));
  }
  std::vector<Route> out;
  for (auto& [agent, r] : by_agent) {
    r.cycle_time = cycle_time(r, costs.of(agent));
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace ahpa

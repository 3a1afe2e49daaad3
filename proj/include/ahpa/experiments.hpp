#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ahpa/allocation.hpp"
#include "ahpa/instance.hpp"
#include "ahpa/oracle.hpp"

namespace ahpa {

/// A random desk-scale instance: graph, fleet and the matching travel costs.
struct Instance {
  PatrolGraph graph;
  Fleet fleet;
  SquareMatrix distances;
  CostMatrix costs;

  DistanceMatrix apsp() const { return DistanceMatrix(graph, distances); }
};

/// Random connected graph with n nodes (spanning tree plus up to n chords, lengths in
/// [1, 10)) and m unit-speed agents at distinct random origins.
inline Instance random_instance(Rng& rng, std::size_t n, std::size_t m) {
  auto g = random_connected_graph(rng, n, rng.below(n + 1));
  auto fleet = Fleet::at_origins(random_origins(rng, n, m));
  auto apsp = all_pairs_shortest_paths(g);
  auto costs = travel_costs(apsp, fleet);
  SquareMatrix dist = apsp.matrix();
  return Instance{std::move(g), std::move(fleet), std::move(dist), std::move(costs)};
}

/// Seed for one (m, instance) cell of a sweep, independent of evaluation order.
inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t m, std::size_t instance) {
  return detail::splitmix64(detail::splitmix64(seed ^ (m << 40)) ^ instance);
}

struct SweepRow {
  std::size_t m = 0;
  std::size_t instance = 0;
  double heuristic = 0.0;
  double optimal = 0.0;
  double ratio = 0.0;
};

struct AttritionRow {
  std::size_t m = 0;
  std::size_t instance = 0;
  AgentId lost = 0;
  double before = 0.0;
  double after = 0.0;
  double ratio = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<AttritionRow> attrition;
};

/// Heuristic vs optimal average idleness on random n-node instances for each m in
/// [m_min, m_max], plus the heuristic's idleness growth after losing one random agent.
inline SweepResult bound_sweep(std::size_t n, std::size_t m_min, std::size_t m_max, std::size_t instances,
                               std::uint64_t seed) {
  if (n > kOracleMaxNodes || m_max > kOracleMaxAgents)
    throw CapExceeded("bound sweep exceeds oracle caps (n <= " + std::to_string(kOracleMaxNodes) +
                      ", m <= " + std::to_string(kOracleMaxAgents) + ")");
  if (m_min < 1 || m_min > m_max || m_max > n) throw ValidationError("bad agent range for bound sweep");
  SweepResult out;
  for (std::size_t m = m_min; m <= m_max; ++m)
    for (std::size_t k = 0; k < instances; ++k) {
      Rng rng(cell_seed(seed, m, k));
      auto inst = random_instance(rng, n, m);
      const auto heuristic = ahpa_solution(inst.graph, inst.fleet, inst.costs, seed);
      const auto optimal = solve_centralized(inst.graph, inst.fleet, inst.costs);
      out.rows.push_back({m, k, heuristic.objective, optimal.objective, approximation_ratio(heuristic, optimal)});
      // Instances where every agent only holds its origin have zero idleness and no
      // meaningful growth ratio.
      if (m >= 2 && heuristic.objective > 0.0) {
        const auto lost = static_cast<AgentId>(rng.below(m));
        const auto after = ahpa_solution(inst.graph, inst.fleet.without(lost), inst.costs, seed);
        out.attrition.push_back(
            {m, k, lost, heuristic.objective, after.objective, after.objective / heuristic.objective});
      }
    }
  return out;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "m,instance,heuristic_z,optimal_z,ratio\n";
  for (const auto& r : rows)
    out += std::to_string(r.m) + "," + std::to_string(r.instance) + "," + format_double(r.heuristic) + "," +
           format_double(r.optimal) + "," + format_double(r.ratio) + "\n";
  return out;
}

/// Max and mean ratio per m.
inline std::string sweep_summary_csv(const std::vector<SweepRow>& rows) {
  std::map<std::size_t, std::vector<double>> by_m;
  for (const auto& r : rows) by_m[r.m].push_back(r.ratio);
  std::string out = "m,instances,max_ratio,mean_ratio,bound\n";
  for (const auto& [m, ratios] : by_m) {
    double sum = 0.0;
    for (double x : ratios) sum += x;
    out += std::to_string(m) + "," + std::to_string(ratios.size()) + "," +
           format_double(*std::max_element(ratios.begin(), ratios.end())) + "," +
           format_double(sum / static_cast<double>(ratios.size())) + "," + std::to_string(m) + "\n";
  }
  return out;
}

inline std::string attrition_to_csv(const std::vector<AttritionRow>& rows) {
  std::string out = "m,instance,lost,before_z,after_z,ratio,reference\n";
  for (const auto& r : rows)
    out += std::to_string(r.m) + "," + std::to_string(r.instance) + "," + std::to_string(r.lost) + "," +
           format_double(r.before) + "," + format_double(r.after) + "," + format_double(r.ratio) + "," +
           format_double(static_cast<double>(r.m) / static_cast<double>(r.m - 1)) + "\n";
  return out;
}

/// Three agents on the line at 0, 1, 2 with speeds 1, 1, 2.
inline std::vector<LineAgent> counterexample_agents() { return {{0.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}}; }

/// Same positions with equal speeds.
inline std::vector<LineAgent> counterexample_agents_homogeneous() { return {{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}}; }

struct LineQuery {
  double x = 0.0;
  AgentId owner = 0;
  std::vector<double> times; // per agent; infinity for dead agents
};

inline LineQuery query_line(double x, const std::vector<LineAgent>& agents, const std::vector<bool>& alive) {
  LineQuery q;
  q.x = x;
  q.owner = line_owner_at(x, agents, alive);
  for (std::size_t a = 0; a < agents.size(); ++a)
    q.times.push_back(alive[a] ? line_time(agents[a], x) : std::numeric_limits<double>::infinity());
  return q;
}

inline std::string line_query_to_csv(const LineQuery& q) {
  std::string out = "x,agent,time,owner\n";
  for (std::size_t a = 0; a < q.times.size(); ++a)
    out += format_double(q.x) + "," + std::to_string(a) + "," + format_double(q.times[a]) + "," +
           (static_cast<AgentId>(a) == q.owner ? "1" : "0") + "\n";
  return out;
}

} // namespace ahpa

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ahpa/allocation.hpp"
#include "ahpa/csv.hpp"
#include "ahpa/error.hpp"
#include "ahpa/fleet.hpp"
#include "ahpa/graph.hpp"
#include "ahpa/instance.hpp"
#include "ahpa/routing.hpp"

namespace ahpa {

struct AttritionEvent {
  double time = 0.0;
  /// Agent to remove; nullopt picks uniformly among alive agents using the scenario seed.
  std::optional<AgentId> agent;
};

struct Scenario {
  std::string graph_path;
  Fleet fleet;
  std::uint64_t tie_seed = 0;
  /// Drives "random" attrition picks. Defaults to tie_seed when not given.
  std::uint64_t seed = 0;
  double horizon = 0.0;
  double tick = 0.1;
  std::vector<AttritionEvent> attrition;

  std::size_t tick_count() const { return static_cast<std::size_t>(std::floor(horizon / tick + 1e-9)); }

  void validate() const {
    if (!(tick > 0.0)) throw ValidationError("tick must be positive");
    if (!(horizon >= 0.0)) throw ValidationError("horizon must be nonnegative");
    if (fleet.size() == 0) throw ValidationError("scenario has no agents");
    std::set<AgentId> killed;
    for (std::size_t k = 0; k < attrition.size(); ++k) {
      const auto& e = attrition[k];
      if (e.time < 0.0 || e.time > horizon)
        throw ValidationError("attrition at t=" + format_double(e.time) + " outside horizon");
      if (k > 0 && e.time < attrition[k - 1].time) throw ValidationError("attrition events not sorted by time");
      if (e.agent) {
        if (*e.agent < 0 || static_cast<std::size_t>(*e.agent) >= fleet.size())
          throw ValidationError("attrition names unknown agent " + std::to_string(*e.agent));
        if (!killed.insert(*e.agent).second)
          throw ValidationError("agent " + std::to_string(*e.agent) + " removed twice");
      }
    }
    if (attrition.size() > fleet.size()) throw ValidationError("more attrition events than agents");
  }
};

/**
 * Parses a scenario file. Recognized records, one per line:
 *
 *     graph <path>
 *     horizon <seconds>
 *     tick <seconds>
 *     tie_seed <int>
 *     seed <int>
 *     agent <id> <origin> <speed>
 *     attrition <time> <agent-id | random>
 *
 * Agent ids must be dense 0..m-1. `#` starts a comment line.
 */
inline Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_seed = false, have_horizon = false;
  std::map<long long, AgentSpec> agents;
  auto fail = [&](const std::string& what) {
    throw ValidationError("scenario line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok.front().front() == '#') continue;
    const auto key = tok[0];
    auto need = [&](std::size_t count) {
      if (tok.size() != count) fail("`" + std::string(key) + "` expects " + std::to_string(count - 1) + " values");
    };
    try {
      if (key == "graph") {
        need(2);
        sc.graph_path = std::string(tok[1]);
      } else if (key == "horizon") {
        need(2);
        sc.horizon = parse_double(tok[1]);
        have_horizon = true;
      } else if (key == "tick") {
        need(2);
        sc.tick = parse_double(tok[1]);
      } else if (key == "tie_seed") {
        need(2);
        sc.tie_seed = static_cast<std::uint64_t>(parse_int(tok[1]));
      } else if (key == "seed") {
        need(2);
        sc.seed = static_cast<std::uint64_t>(parse_int(tok[1]));
        have_seed = true;
      } else if (key == "agent") {
        need(4);
        const auto id = parse_int(tok[1]);
        if (agents.count(id)) fail("duplicate agent id " + std::string(tok[1]));
        agents[id] = AgentSpec{static_cast<NodeId>(parse_int(tok[2])), parse_double(tok[3]), true};
      } else if (key == "attrition") {
        need(3);
        AttritionEvent e;
        e.time = parse_double(tok[1]);
        if (tok[2] != "random") e.agent = static_cast<AgentId>(parse_int(tok[2]));
        sc.attrition.push_back(e);
      } else {
        fail("unknown record `" + std::string(key) + "`");
      }
    } catch (const ValidationError& err) {
      if (std::string(err.what()).rfind("scenario line", 0) == 0) throw;
      fail(err.what());
    }
  }
  if (sc.graph_path.empty()) throw ValidationError("scenario is missing `graph`");
  if (!have_horizon) throw ValidationError("scenario is missing `horizon`");
  std::vector<AgentSpec> list;
  for (const auto& [id, spec] : agents) {
    if (id != static_cast<long long>(list.size())) throw ValidationError("agent ids must be dense from 0");
    list.push_back(spec);
  }
  sc.fleet = Fleet(std::move(list));
  if (!have_seed) sc.seed = sc.tie_seed;
  sc.validate();
  return sc;
}

/// Loads a scenario file; a relative graph path is resolved against the scenario's directory.
inline Scenario load_scenario(const std::string& path) {
  Scenario sc = parse_scenario(read_file(path));
  std::filesystem::path graph(sc.graph_path);
  if (graph.is_relative()) sc.graph_path = (std::filesystem::path(path).parent_path() / graph).string();
  return sc;
}

struct MetricsRow {
  double t = 0.0;
  double avg_idleness = 0.0;
  double std_idleness = 0.0;
  std::size_t messages = 0;
};

struct Visit {
  double time = 0.0;
  NodeId node = 0;
  AgentId agent = 0;
};

/// An agent starting a new closed tour (initially, or after a reallocation).
struct RouteStart {
  double time = 0.0;
  AgentId agent = 0;
  Route route;
};

struct EventRecord {
  double time = 0.0;
  AgentId lost = 0;
  /// Surviving agents whose allocation changed and that recompute their tour.
  std::set<AgentId> retoured;
  /// Neighbors of the lost agent in the assignment that was in force before the loss.
  std::set<AgentId> neighbors_of_lost;
  Assignment before;
  Assignment after;
};

struct MetricsLog {
  std::vector<MetricsRow> rows;
  std::vector<Visit> visits;
  std::vector<RouteStart> route_starts;
  std::vector<EventRecord> events;
  Assignment final_assignment;
  std::vector<bool> final_alive;
  /// Nodes held by a stationary agent at the end of the run; they are never idle.
  std::vector<NodeId> held_nodes;
  std::size_t node_count = 0;
  double tick = 0.1;
};

/**
 * Per-run simulation state.
 *
 * Agents travel continuously along the legs of their tour; time advances in fixed ticks
 * but arrivals are timestamped exactly inside the tick. A node's idleness is the time
 * since its last visit and every node starts at idleness 0.
 */
class SimState {
public:
  SimState(const PatrolGraph& g, const DistanceMatrix& apsp, const Fleet& fleet, const CostMatrix& costs,
           std::uint64_t tie_seed)
      : graph_(&g), apsp_(&apsp), costs_(&costs), fleet_(fleet), tie_seed_(tie_seed),
        last_visit_(g.node_count(), 0.0), agents_(fleet.size()) {
    assignment_ = voronoi_partition(g, fleet_, costs, tie_seed_);
    for (AgentId a : fleet_.alive_agents()) {
      agents_[a].at = fleet_[a].origin;
      start_route(a, assignment_.nodes_of(a), 0.0);
    }
  }

  double clock() const { return clock_; }
  std::size_t message_count() const { return messages_; }
  const Fleet& fleet() const { return fleet_; }
  const Assignment& assignment() const { return assignment_; }
  const Route& route_of(AgentId a) const { return agents_[a].route; }
  double last_visit(NodeId i) const { return last_visit_[i]; }
  double idleness(NodeId i) const { return clock_ - last_visit_[i]; }
  MetricsLog& log() { return log_; }

  /// Nodes currently occupied by an alive agent whose tour has a single stop.
  std::vector<NodeId> held_nodes() const {
    std::vector<NodeId> out;
    for (AgentId a : fleet_.alive_agents())
      if (agents_[a].route.stops() < 2) out.push_back(agents_[a].at);
    return out;
  }
  const MetricsLog& log() const { return log_; }

  /// Removes `agent` at the current clock: one message, a fresh Voronoi partition over the
  /// survivors, and a new tour for each survivor whose allocation changed. A moving
  /// survivor first finishes its current leg.
  void inject_attrition(AgentId agent) {
    if (agent < 0 || static_cast<std::size_t>(agent) >= fleet_.size())
      throw ValidationError("unknown agent " + std::to_string(agent));
    if (!fleet_.alive(agent)) throw ValidationError("agent " + std::to_string(agent) + " already dead");
    EventRecord rec;
    rec.time = clock_;
    rec.lost = agent;
    rec.before = assignment_;
    rec.neighbors_of_lost = neighbors(assignment_, *apsp_).of(agent);
    fleet_ = fleet_.without(agent);
    ++messages_;
    if (fleet_.alive_count() > 0) {
      assignment_ = voronoi_partition(*graph_, fleet_, *costs_, tie_seed_);
      for (AgentId a : changed_agents(rec.before, assignment_)) {
        if (!fleet_.alive(a)) continue;
        rec.retoured.insert(a);
        auto& st = agents_[a];
        st.pending = assignment_.nodes_of(a);
        if (st.route.stops() < 2) {
          visit(a, st.at, clock_);  // leaving a held node counts as its last visit
          start_route(a, *st.pending, clock_);
          st.pending.reset();
        }
      }
    } else {
      // No owners remain; keep the old owner map for reporting.
      assignment_ = Assignment(fleet_.size(), rec.before.owners(), tie_seed_);
    }
    rec.after = assignment_;
    log_.events.push_back(std::move(rec));
  }

  /// Moves every alive agent forward to time `until` and records visits.
  void advance_to(double until) {
    const double dt = until - clock_;
    for (AgentId a : fleet_.alive_agents()) advance_agent(a, dt);
    clock_ = until;
  }

  MetricsRow sample() const {
    const double n = static_cast<double>(last_visit_.size());
    double sum = 0.0;
    for (double lv : last_visit_) sum += clock_ - lv;
    const double mean = sum / n;
    double var = 0.0;
    for (double lv : last_visit_) var += (clock_ - lv - mean) * (clock_ - lv - mean);
    return {clock_, mean, std::sqrt(var / n), messages_};
  }

private:
  struct AgentState {
    Route route;
    std::size_t target = 0; // index into route.order of the node being approached
    NodeId at = 0;          // last node reached
    double leg_cost = 0.0;
    double leg_elapsed = 0.0;
    std::optional<std::vector<NodeId>> pending;
  };

  void start_route(AgentId a, const std::vector<NodeId>& nodes, double when) {
    auto& st = agents_[a];
    st.route = nn_tour(a, nodes, st.at, costs_->of(a));
    log_.route_starts.push_back({when, a, st.route});
    begin_leg(a, 1);
  }

  void begin_leg(AgentId a, std::size_t target) {
    auto& st = agents_[a];
    if (st.route.stops() < 2) {
      st.target = 0;
      st.leg_cost = 0.0;
      st.leg_elapsed = 0.0;
      return;
    }
    st.target = target % st.route.stops();
    st.leg_cost = (*costs_)(a, st.at, st.route.order[st.target]);
    st.leg_elapsed = 0.0;
  }

  void visit(AgentId a, NodeId node, double when) {
    last_visit_[node] = when;
    log_.visits.push_back({when, node, a});
  }

  void advance_agent(AgentId a, double dt) {
    auto& st = agents_[a];
    double used = 0.0;
    while (true) {
      if (st.route.stops() < 2) {
        // Stationary on its only node: that node is continuously observed.
        last_visit_[st.at] = clock_ + dt;
        return;
      }
      const double need = st.leg_cost - st.leg_elapsed;
      if (need > dt - used + 1e-12) {
        st.leg_elapsed += dt - used;
        return;
      }
      used += need;
      st.at = st.route.order[st.target];
      visit(a, st.at, std::min(clock_ + used, clock_ + dt));
      if (st.pending) {
        auto nodes = std::move(*st.pending);
        st.pending.reset();
        start_route(a, nodes, std::min(clock_ + used, clock_ + dt));
      } else {
        begin_leg(a, st.target + 1);
      }
    }
  }

  const PatrolGraph* graph_;
  const DistanceMatrix* apsp_;
  const CostMatrix* costs_;
  Fleet fleet_;
  std::uint64_t tie_seed_;
  Assignment assignment_;
  std::vector<double> last_visit_;
  std::vector<AgentState> agents_;
  double clock_ = 0.0;
  std::size_t messages_ = 0;
  MetricsLog log_;
};

/// Runs the scenario on an already loaded graph. Attrition events are applied at the
/// first tick boundary at or after their time; rows are sampled at every tick.
inline MetricsLog run(const Scenario& scenario, const PatrolGraph& g) {
  scenario.validate();
  scenario.fleet.check_against(g.node_count());
  const auto apsp = all_pairs_shortest_paths(g);
  const auto costs = travel_costs(apsp, scenario.fleet);
  SimState state(g, apsp, scenario.fleet, costs, scenario.tie_seed);
  Rng picker(scenario.seed);

  const std::size_t ticks = scenario.tick_count();
  std::size_t next_event = 0;
  for (std::size_t k = 1; k <= ticks; ++k) {
    while (next_event < scenario.attrition.size() &&
           std::ceil(scenario.attrition[next_event].time / scenario.tick - 1e-9) <= static_cast<double>(k - 1)) {
      const auto& e = scenario.attrition[next_event++];
      AgentId victim;
      if (e.agent) {
        victim = *e.agent;
      } else {
        auto alive = state.fleet().alive_agents();
        if (alive.empty()) throw ValidationError("random attrition with no alive agents");
        victim = alive[picker.below(alive.size())];
      }
      state.inject_attrition(victim);
    }
    state.advance_to(static_cast<double>(k) * scenario.tick);
    state.log().rows.push_back(state.sample());
  }
  MetricsLog log = std::move(state.log());
  log.final_assignment = state.assignment();
  for (std::size_t a = 0; a < state.fleet().size(); ++a) log.final_alive.push_back(state.fleet().alive(static_cast<AgentId>(a)));
  log.held_nodes = state.held_nodes();
  log.node_count = g.node_count();
  log.tick = scenario.tick;
  return log;
}

/// Loads the scenario's graph file and runs it.
inline MetricsLog run(const Scenario& scenario) {
  const auto g = parse_graph(read_file(scenario.graph_path));
  return run(scenario, g);
}

// ---------------------------------------------------------------------------
// Reporting

inline std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "t,avg_idleness,std_idleness,messages\n";
  for (const auto& r : rows)
    out += format_double(r.t) + "," + format_double(r.avg_idleness) + "," + format_double(r.std_idleness) + "," +
           format_double(static_cast<double>(r.messages)) + "\n";
  return out;
}

inline std::vector<MetricsRow> metrics_from_csv(std::string_view text) {
  auto table = parse_csv(text);
  if (table.header != std::vector<std::string>{"t", "avg_idleness", "std_idleness", "messages"})
    throw ValidationError("metrics csv must have header `t,avg_idleness,std_idleness,messages`");
  std::vector<MetricsRow> rows;
  for (const auto& r : table.rows)
    rows.push_back({parse_double(r[0]), parse_double(r[1]), parse_double(r[2]),
                    static_cast<std::size_t>(parse_double(r[3]))});
  return rows;
}

/// Element-wise mean of several runs sampled on the same tick grid. Message counts
/// may become fractional, so the averaged table keeps them as reals.
struct AveragedRow {
  double t = 0.0;
  double avg_idleness = 0.0;
  double std_idleness = 0.0;
  double messages = 0.0;
};

inline std::vector<AveragedRow> average_runs(const std::vector<MetricsLog>& logs) {
  std::vector<AveragedRow> out;
  if (logs.empty()) return out;
  const std::size_t rows = logs.front().rows.size();
  for (const auto& l : logs)
    if (l.rows.size() != rows) throw ValidationError("runs have different lengths");
  for (std::size_t k = 0; k < rows; ++k) {
    AveragedRow row{logs.front().rows[k].t, 0.0, 0.0, 0.0};
    for (const auto& l : logs) {
      row.avg_idleness += l.rows[k].avg_idleness;
      row.std_idleness += l.rows[k].std_idleness;
      row.messages += static_cast<double>(l.rows[k].messages);
    }
    const double c = static_cast<double>(logs.size());
    row.avg_idleness /= c;
    row.std_idleness /= c;
    row.messages /= c;
    out.push_back(row);
  }
  return out;
}

inline std::string averaged_to_csv(const std::vector<AveragedRow>& rows) {
  std::string out = "t,avg_idleness,std_idleness,messages\n";
  for (const auto& r : rows)
    out += format_double(r.t) + "," + format_double(r.avg_idleness) + "," + format_double(r.std_idleness) + "," +
           format_double(r.messages) + "\n";
  return out;
}

/// Mean over nodes of the span between each node's two most recent visits. Held nodes
/// count as zero; other nodes visited fewer than twice are skipped. nullopt if no node qualifies.
inline std::optional<double> mean_revisit_interval(const MetricsLog& log) {
  std::vector<std::vector<double>> per_node(log.node_count);
  for (const auto& v : log.visits) per_node[v.node].push_back(v.time);
  std::vector<char> held(log.node_count, 0);
  for (NodeId i : log.held_nodes) held[i] = 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < per_node.size(); ++i) {
    const auto& times = per_node[i];
    if (held[i]) {
      ++count;
      continue;
    }
    if (times.size() < 2) continue;
    sum += times[times.size() - 1] - times[times.size() - 2];
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

struct Report {
  std::string timeseries_csv;
  std::string summary_csv;
  std::string summary_text;
};

/// Time-series CSV plus a `metric,value` summary: mean and max of the average idleness
/// over the horizon, final message count and final node count per agent.
inline Report report(const MetricsLog& log) {
  Report r;
  r.timeseries_csv = metrics_to_csv(log.rows);
  double mean = 0.0, peak = 0.0;
  for (const auto& row : log.rows) {
    mean += row.avg_idleness;
    peak = std::max(peak, row.avg_idleness);
  }
  if (!log.rows.empty()) mean /= static_cast<double>(log.rows.size());
  const std::size_t messages = log.rows.empty() ? 0 : log.rows.back().messages;
  r.summary_csv = "metric,value\n";
  r.summary_csv += "ticks," + std::to_string(log.rows.size()) + "\n";
  r.summary_csv += "mean_avg_idleness," + format_double(mean) + "\n";
  r.summary_csv += "max_avg_idleness," + format_double(peak) + "\n";
  r.summary_csv += "messages," + std::to_string(messages) + "\n";
  r.summary_text = "ticks: " + std::to_string(log.rows.size()) + "\nmean average idleness (instantaneous, per tick): " +
                   format_double(mean) + " s\nmax average idleness: " + format_double(peak) +
                   " s\nmessages: " + std::to_string(messages) + "\n";
  for (std::size_t a = 0; a < log.final_assignment.agent_count(); ++a) {
    const auto count = log.final_assignment.count_of(static_cast<AgentId>(a));
    const bool alive = a < log.final_alive.size() && log.final_alive[a];
    const auto owned = alive ? count : 0;
    r.summary_csv += "nodes_agent_" + std::to_string(a) + "," + std::to_string(owned) + "\n";
    r.summary_text += "agent " + std::to_string(a) + (alive ? "" : " (lost)") + ": " + std::to_string(owned) + " nodes\n";
  }
  return r;
}

} // namespace ahpa

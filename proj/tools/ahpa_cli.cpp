// Command-line front end: partition, route, simulate, oracle, bound-sweep, counterexample.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ahpa/ahpa.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kCap = 3 };

struct FleetArgs {
  std::string graph;
  std::string scenario;
  std::vector<int> origins;
  std::vector<double> speeds;
};

void add_fleet_options(CLI::App* cmd, FleetArgs& args) {
  cmd->add_option("--graph", args.graph, "graph file (n/e records)");
  cmd->add_option("--scenario", args.scenario, "scenario file supplying graph and agents");
  cmd->add_option("--origins", args.origins, "agent origin nodes, agent ids follow the order")->delimiter(',');
  cmd->add_option("--speeds", args.speeds, "agent speeds (default 1 for every agent)")->delimiter(',');
}

struct Loaded {
  std::optional<ahpa::PatrolGraph> graph;
  ahpa::Fleet fleet;
  std::uint64_t tie_seed = 0;
};

Loaded load_inputs(const FleetArgs& args) {
  Loaded out;
  std::string graph_path = args.graph;
  if (!args.scenario.empty()) {
    auto sc = ahpa::load_scenario(args.scenario);
    if (graph_path.empty()) graph_path = sc.graph_path;
    out.fleet = sc.fleet;
    out.tie_seed = sc.tie_seed;
  }
  if (graph_path.empty()) throw ahpa::ValidationError("no graph given (use --graph or --scenario)");
  out.graph = ahpa::parse_graph(ahpa::read_file(graph_path));
  if (!args.origins.empty()) {
    if (!args.speeds.empty() && args.speeds.size() != args.origins.size())
      throw ahpa::ValidationError("--speeds must list one value per origin");
    std::vector<ahpa::AgentSpec> agents;
    for (std::size_t a = 0; a < args.origins.size(); ++a)
      agents.push_back({args.origins[a], args.speeds.empty() ? 1.0 : args.speeds[a], true});
    out.fleet = ahpa::Fleet(std::move(agents));
  }
  if (out.fleet.size() == 0) throw ahpa::ValidationError("no agents given (use --origins or --scenario)");
  out.fleet.check_against(out.graph->node_count());
  return out;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ahpa::ValidationError("cannot create output directory `" + dir + "`");
  return out;
}

void emit(const fs::path& dir, const std::string& name, const std::string& content) {
  ahpa::write_file((dir / name).string(), content);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi-allocation patrolling: partition, tours, simulation and exact comparison"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  FleetArgs fleet_args;

  auto* partition = app.add_subcommand("partition", "Voronoi node allocation and neighbor relation");
  add_fleet_options(partition, fleet_args);
  partition->add_option("--seed", seed, "tie-breaking seed");
  partition->add_option("--out", out_dir, "output directory");

  bool exact = false;
  auto* route = app.add_subcommand("route", "Voronoi allocation plus one tour per agent");
  add_fleet_options(route, fleet_args);
  route->add_option("--seed", seed, "tie-breaking seed");
  route->add_option("--out", out_dir, "output directory");
  route->add_flag("--exact", exact, "use the exact tour solver instead of nearest neighbor");

  std::string scenario_path;
  std::size_t runs = 1;
  auto* simulate = app.add_subcommand("simulate", "Run the patrolling simulation");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--runs", runs, "number of runs; run k uses seed + k for random attrition")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "override the scenario's attrition seed");
  simulate->add_option("--out", out_dir, "output directory");

  std::vector<int> dead;
  auto* oracle = app.add_subcommand("oracle", "Exact optimum by enumeration, compared with the heuristic");
  add_fleet_options(oracle, fleet_args);
  oracle->add_option("--seed", seed, "tie-breaking seed for the heuristic");
  oracle->add_option("--dead", dead, "agents removed before solving")->delimiter(',');
  oracle->add_option("--out", out_dir, "output directory");

  std::size_t sweep_n = 6, m_min = 2, m_max = 6, instances = 20;
  auto* sweep = app.add_subcommand("bound-sweep", "Heuristic/optimal ratio over random small instances");
  sweep->add_option("--n", sweep_n, "nodes per instance");
  sweep->add_option("--m-min", m_min, "smallest agent count");
  sweep->add_option("--m-max", m_max, "largest agent count");
  sweep->add_option("--instances", instances, "instances per agent count");
  sweep->add_option("--seed", seed, "instance generation seed");
  sweep->add_option("--out", out_dir, "output directory");

  auto* counter = app.add_subcommand("counterexample", "Speed-weighted Voronoi cells of three agents on a line");
  counter->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto out = prepare_out(out_dir);

    if (*partition || *route || *oracle) {
      auto in = load_inputs(fleet_args);
      const std::uint64_t tie_seed = seed.value_or(in.tie_seed);
      const auto& g = *in.graph;
      const auto apsp = ahpa::all_pairs_shortest_paths(g);
      const auto costs = ahpa::travel_costs(apsp, in.fleet);

      if (*partition) {
        const auto assign = ahpa::voronoi_partition(g, in.fleet, costs, tie_seed);
        const auto csv = ahpa::assignment_to_csv(assign);
        if (!(ahpa::assignment_from_csv(csv, in.fleet.size()) == assign))
          throw ahpa::ValidationError("assignment csv failed to round-trip");
        emit(out, "assignment.csv", csv);
        emit(out, "neighbors.csv", ahpa::neighbors_to_csv(ahpa::neighbors(assign, apsp)));
        std::cout << "assigned " << g.node_count() << " nodes to " << in.fleet.size() << " agents\n";
      } else if (*route) {
        const auto assign = ahpa::voronoi_partition(g, in.fleet, costs, tie_seed);
        std::vector<ahpa::Route> routes;
        for (auto a : in.fleet.alive_agents()) {
          const auto nodes = assign.nodes_of(a);
          routes.push_back(exact ? ahpa::exact_tour(a, nodes, in.fleet[a].origin, costs.of(a))
                                 : ahpa::nn_tour(a, nodes, in.fleet[a].origin, costs.of(a)));
        }
        const double z = ahpa::evaluate_objective(assign, routes, g.node_count());
        emit(out, "assignment.csv", ahpa::assignment_to_csv(assign));
        emit(out, "routes.csv", ahpa::routes_to_csv(routes));
        emit(out, "objective.csv", ahpa::objective_to_csv(z));
        std::cout << "average idleness " << ahpa::format_double(z) << " s\n";
      } else {
        auto fleet = in.fleet;
        for (int a : dead) fleet = fleet.without(a);
        const auto optimal = ahpa::solve_centralized(g, fleet, costs);
        const auto heuristic = ahpa::ahpa_solution(g, fleet, costs, tie_seed);
        const double ratio = ahpa::approximation_ratio(heuristic, optimal);
        emit(out, "optimal_assignment.csv", ahpa::assignment_to_csv(optimal.assignment));
        emit(out, "optimal_routes.csv", ahpa::routes_to_csv(optimal.routes));
        emit(out, "optimal_objective.csv", ahpa::objective_to_csv(optimal.objective));
        emit(out, "heuristic_assignment.csv", ahpa::assignment_to_csv(heuristic.assignment));
        emit(out, "heuristic_routes.csv", ahpa::routes_to_csv(heuristic.routes));
        emit(out, "heuristic_objective.csv", ahpa::objective_to_csv(heuristic.objective));
        emit(out, "comparison.csv",
             "heuristic_z,optimal_z,ratio\n" + ahpa::format_double(heuristic.objective) + "," +
                 ahpa::format_double(optimal.objective) + "," + ahpa::format_double(ratio) + "\n");
        std::cout << "optimal " << ahpa::format_double(optimal.objective) << " s, heuristic "
                  << ahpa::format_double(heuristic.objective) << " s, ratio " << ahpa::format_double(ratio)
                  << "\n";
      }
    } else if (*simulate) {
      auto sc = ahpa::load_scenario(scenario_path);
      if (seed) sc.seed = *seed;
      const auto g = ahpa::parse_graph(ahpa::read_file(sc.graph_path));
      std::vector<ahpa::MetricsLog> logs;
      std::string summary;
      for (std::size_t r = 0; r < runs; ++r) {
        auto run_sc = sc;
        run_sc.seed = sc.seed + r;
        logs.push_back(ahpa::run(run_sc, g));
        const auto rep = ahpa::report(logs.back());
        emit(out, "run_" + std::to_string(r) + ".csv", rep.timeseries_csv);
        emit(out, "summary_" + std::to_string(r) + ".csv", rep.summary_csv);
        summary += "run " + std::to_string(r) + "\n" + rep.summary_text;
      }
      const auto averaged = ahpa::average_runs(logs);
      emit(out, "averaged.csv", ahpa::averaged_to_csv(averaged));
      emit(out, "summary.txt", summary);
      std::cout << summary;
    } else if (*sweep) {
      const auto result = ahpa::bound_sweep(sweep_n, m_min, m_max, instances, seed.value_or(1));
      const auto table = ahpa::sweep_summary_csv(result.rows);
      emit(out, "ratios.csv", ahpa::sweep_to_csv(result.rows));
      emit(out, "ratio_summary.csv", table);
      emit(out, "attrition.csv", ahpa::attrition_to_csv(result.attrition));
      std::cout << table;
    } else if (*counter) {
      const auto agents = ahpa::counterexample_agents();
      const auto cells = ahpa::mw_voronoi_line(agents);
      const auto query = ahpa::query_line(-1.0, agents, {false, true, true});
      emit(out, "intervals.csv", ahpa::intervals_to_csv(cells));
      emit(out, "intervals_homogeneous.csv",
           ahpa::intervals_to_csv(ahpa::mw_voronoi_line(ahpa::counterexample_agents_homogeneous())));
      emit(out, "query_agent0_dead.csv", ahpa::line_query_to_csv(query));
      std::cout << ahpa::intervals_to_csv(cells);
    }
  } catch (const ahpa::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const ahpa::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

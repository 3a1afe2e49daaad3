#include <gtest/gtest.h>

#include <set>

#include "ahpa/ahpa.hpp"
#include "oracles.hpp"

using namespace ahpa;

namespace {

Instance make(std::uint64_t seed, std::size_t n, std::size_t m) {
  Rng rng(seed);
  return random_instance(rng, n, m);
}

} // namespace

TEST(EvaluateObjective, SingleAgentIsCycleTime) {
  SquareMatrix c(3, 2.0);
  for (int i = 0; i < 3; ++i) c(i, i) = 0;
  Assignment a(1, {0, 0, 0});
  auto r = nn_tour(0, a.nodes_of(0), 0, c);
  EXPECT_EQ(evaluate_objective(a, {r}, 3), r.cycle_time);
}

TEST(EvaluateObjective, DirectFormula) {
  Assignment a(2, {0, 0, 1, 1, 1});
  Route r0{0, {0, 1}, {0, 2}, 4.0};
  Route r1{1, {2, 3, 4}, {0, 2, 4}, 6.0};
  EXPECT_NEAR(evaluate_objective(a, {r0, r1}, 5), 5.2, 1e-12);
}

TEST(EvaluateObjective, CoverageViolations) {
  Assignment a(2, {0, 0, 1});
  Route r0{0, {0, 1}, {0, 1}, 2.0};
  EXPECT_THROW(evaluate_objective(a, {r0}, 3), ValidationError);  // node 2 uncovered
  Route wrong{1, {2, 1}, {0, 1}, 2.0};
  EXPECT_THROW(evaluate_objective(a, {r0, wrong}, 3), ValidationError);
}

TEST(SolveCentralized, SingleAgentIsTsp) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = make(seed, 7, 1);
    auto sol = solve_centralized(inst.graph, inst.fleet, inst.costs);
    std::vector<NodeId> all{0, 1, 2, 3, 4, 5, 6};
    EXPECT_NEAR(sol.objective, oracle::factorial_tour(all, inst.fleet[0].origin, inst.costs.of(0)), 1e-9);
  }
}

TEST(SolveCentralized, MatchesIndependentBruteForce) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto inst = make(seed + 50, 6, 2 + seed % 2);
    auto sol = solve_centralized(inst.graph, inst.fleet, inst.costs);
    EXPECT_NEAR(sol.objective, oracle::brute_centralized(inst.fleet, inst.costs, 6, false), 1e-9);
    EXPECT_NEAR(evaluate_objective(sol.assignment, sol.routes, 6), sol.objective, 1e-12);
  }
}

TEST(SolveCentralized, MultiCoverageNeverHelps) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = make(seed + 70, 5, 2 + seed % 2);
    const double single = oracle::brute_centralized(inst.fleet, inst.costs, 5, false);
    const double multi = oracle::brute_centralized(inst.fleet, inst.costs, 5, true);
    EXPECT_NEAR(single, multi, 1e-9) << "seed " << seed;
  }
}

TEST(SolveCentralized, DominatesHeuristic) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto inst = make(seed + 90, 8, 1 + seed % 5);
    auto opt = solve_centralized(inst.graph, inst.fleet, inst.costs);
    auto heur = ahpa_solution(inst.graph, inst.fleet, inst.costs, seed);
    EXPECT_LE(opt.objective, heur.objective + 1e-9);
    EXPECT_GE(approximation_ratio(heur, opt), 1.0 - 1e-12);
  }
}

TEST(SolveCentralized, LexicographicallySmallestAmongOptima) {
  // Symmetric path 0-1-2 with agents at both ends: node 1 can go either way.
  auto g = PatrolGraph::create(3, {{0, 1, 1}, {1, 2, 1}});
  auto d = all_pairs_shortest_paths(g);
  auto fleet = Fleet::at_origins({0, 2});
  auto sol = solve_centralized(g, fleet, travel_costs(d, fleet));
  EXPECT_EQ(sol.assignment.owners(), (std::vector<AgentId>{0, 0, 1}));
  EXPECT_NEAR(sol.objective, 2.0 * 2 / 3, 1e-12);
}

TEST(SolveCentralized, Caps) {
  auto big = make(1, 9, 2);
  EXPECT_THROW(solve_centralized(big.graph, big.fleet, big.costs), CapExceeded);
  auto many = make(2, 8, 7);
  EXPECT_THROW(solve_centralized(many.graph, many.fleet, many.costs), CapExceeded);
}

TEST(SolveWithAttrition, EquivalentToSmallerFleet) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = make(seed + 200, 6, 3);
    const auto lost = static_cast<AgentId>(seed % 3);
    auto with = solve_with_attrition(inst.graph, inst.fleet, inst.costs, {lost});
    auto fleet2 = inst.fleet.without(lost);
    EXPECT_NEAR(with.objective, oracle::brute_centralized(fleet2, inst.costs, 6, false), 1e-9);
    EXPECT_EQ(with.assignment.count_of(lost), 0u);
    auto before = solve_centralized(inst.graph, inst.fleet, inst.costs);
    EXPECT_GE(with.objective, before.objective - 1e-9);
  }
}

TEST(SolveWithAttrition, AllButOneIsTsp) {
  auto inst = make(300, 6, 3);
  auto sol = solve_with_attrition(inst.graph, inst.fleet, inst.costs, {0, 2});
  std::vector<NodeId> all{0, 1, 2, 3, 4, 5};
  EXPECT_NEAR(sol.objective, oracle::factorial_tour(all, inst.fleet[1].origin, inst.costs.of(1)), 1e-9);
  EXPECT_THROW(solve_with_attrition(inst.graph, inst.fleet, inst.costs, {0, 1, 2}), ValidationError);
}

TEST(SolveWithAttrition, MonotoneAsAgentsAreRemoved) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto inst = make(seed + 400, 7, 4);
    std::set<AgentId> dead;
    double prev = solve_centralized(inst.graph, inst.fleet, inst.costs).objective;
    for (AgentId a = 0; a < 3; ++a) {
      dead.insert(a);
      const double now = solve_with_attrition(inst.graph, inst.fleet, inst.costs, dead).objective;
      EXPECT_GE(now, prev - 1e-9);
      prev = now;
    }
  }
}

TEST(ApproximationRatio, Basics) {
  Solution s;
  s.objective = 3.0;
  EXPECT_EQ(approximation_ratio(s, s), 1.0);
  Solution zero;
  EXPECT_EQ(approximation_ratio(zero, zero), 1.0);
  EXPECT_THROW(approximation_ratio(s, zero), ValidationError);
}

TEST(BoundSweep, RatiosWithinEnvelope) {
  auto result = bound_sweep(6, 2, 6, 5, 11);
  ASSERT_EQ(result.rows.size(), 25u);
  bool saw_one = false;
  for (const auto& r : result.rows) {
    EXPECT_GE(r.ratio, 1.0 - 1e-12);
    EXPECT_LE(r.ratio, static_cast<double>(r.m));
    if (r.ratio == 1.0) saw_one = true;
  }
  EXPECT_TRUE(saw_one);
  EXPECT_EQ(sweep_to_csv(bound_sweep(6, 2, 6, 5, 11).rows), sweep_to_csv(result.rows));
  EXPECT_THROW(bound_sweep(9, 2, 3, 1, 1), CapExceeded);
}

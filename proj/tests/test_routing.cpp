#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "ahpa/ahpa.hpp"
#include "oracles.hpp"

using namespace ahpa;

namespace {

void expect_valid_route(const Route& r, const std::vector<NodeId>& assigned, NodeId origin, const SquareMatrix& cost) {
  ASSERT_FALSE(r.order.empty());
  EXPECT_EQ(r.order.front(), origin);
  EXPECT_EQ(r.visit_times.front(), 0.0);
  std::set<NodeId> expect(assigned.begin(), assigned.end());
  expect.insert(origin);
  std::multiset<NodeId> got(r.order.begin(), r.order.end());
  EXPECT_EQ(got.size(), expect.size());
  EXPECT_EQ(std::set<NodeId>(r.order.begin(), r.order.end()), expect);
  for (std::size_t k = 1; k < r.visit_times.size(); ++k) EXPECT_GT(r.visit_times[k], r.visit_times[k - 1]);
  EXPECT_NEAR(cycle_time(r, cost), r.cycle_time, 1e-9);
  if (r.order.size() > 1) {
    EXPECT_NEAR(r.cycle_time, r.visit_times.back() + cost(r.order.back(), origin), 1e-9);
  }
}

struct Metric {
  SquareMatrix cost;
  std::vector<NodeId> assigned;
  NodeId origin;
};

Metric random_metric(std::uint64_t seed, std::size_t size) {
  Rng rng(seed);
  const std::size_t n = size + 2 + rng.below(4);
  auto g = random_connected_graph(rng, n, rng.below(n));
  auto d = all_pairs_shortest_paths(g);
  auto picks = random_origins(rng, n, size);
  return {d.matrix(), picks, picks.front()};
}

} // namespace

TEST(NnTour, OriginOnly) {
  SquareMatrix c(3, 1.0);
  auto r = nn_tour(0, std::vector<NodeId>{1}, 1, c);
  EXPECT_EQ(r.order, (std::vector<NodeId>{1}));
  EXPECT_EQ(r.cycle_time, 0.0);
}

TEST(NnTour, EmptyAssignmentIdlesAtOrigin) {
  SquareMatrix c(3, 1.0);
  auto r = nn_tour(2, std::vector<NodeId>{}, 0, c);
  EXPECT_EQ(r.order, (std::vector<NodeId>{0}));
  EXPECT_EQ(r.cycle_time, 0.0);
  EXPECT_EQ(cycle_time(r, c), 0.0);
}

TEST(NnTour, PathGraph) {
  auto g = PatrolGraph::create(3, {{0, 1, 1}, {1, 2, 1}});
  auto d = all_pairs_shortest_paths(g);
  auto r = nn_tour(0, std::vector<NodeId>{1, 2}, 0, d.matrix());
  EXPECT_EQ(r.order, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(r.visit_times, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(r.cycle_time, 4.0);
  EXPECT_EQ(cycle_time(r, d.matrix()), 4.0);
  EXPECT_EQ(exact_tour(0, std::vector<NodeId>{1, 2}, 0, d.matrix()).cycle_time, 4.0);
}

TEST(NnTour, TiesGoToLowestNodeId) {
  // Star centered at 0: every leaf is equally near.
  auto g = PatrolGraph::create(4, {{0, 3, 1}, {0, 1, 1}, {0, 2, 1}});
  auto d = all_pairs_shortest_paths(g);
  auto r = nn_tour(0, std::vector<NodeId>{3, 2, 1}, 0, d.matrix());
  EXPECT_EQ(r.order, (std::vector<NodeId>{0, 1, 2, 3}));
}

TEST(ExactTour, SmallSetsMatchNn) {
  auto m = random_metric(3, 2);
  for (std::size_t size : {0u, 1u}) {
    std::vector<NodeId> assigned(m.assigned.begin(), m.assigned.begin() + size);
    auto a = exact_tour(0, assigned, m.origin, m.cost);
    auto b = nn_tour(0, assigned, m.origin, m.cost);
    EXPECT_EQ(a.order, b.order);
    EXPECT_EQ(a.cycle_time, b.cycle_time);
  }
}

TEST(ExactTour, FivesMatchFactorialEnumeration) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto m = random_metric(seed, 5);
    auto r = exact_tour(0, m.assigned, m.origin, m.cost);
    expect_valid_route(r, m.assigned, m.origin, m.cost);
    EXPECT_NEAR(r.cycle_time, oracle::factorial_tour(m.assigned, m.origin, m.cost), 1e-9);
  }
}

TEST(ExactTour, SandwichAgainstNearestNeighbor) {
  int strict = 0, equal = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto m = random_metric(seed + 100, 2 + seed % 7);
    auto exact = exact_tour(1, m.assigned, m.origin, m.cost);
    auto nn = nn_tour(1, m.assigned, m.origin, m.cost);
    expect_valid_route(exact, m.assigned, m.origin, m.cost);
    expect_valid_route(nn, m.assigned, m.origin, m.cost);
    EXPECT_LE(exact.cycle_time, nn.cycle_time + 1e-9);
    if (exact.cycle_time < nn.cycle_time - 1e-9) ++strict;
    else ++equal;
  }
  EXPECT_GT(strict, 0);
  EXPECT_GT(equal, 0);
}

TEST(ExactTour, CapIsEnforced) {
  auto g = PatrolGraph::create(16, [] {
    std::vector<Edge> e;
    for (NodeId k = 0; k + 1 < 16; ++k) e.push_back({k, k + 1, 1});
    return e;
  }());
  auto d = all_pairs_shortest_paths(g);
  std::vector<NodeId> all(16);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_THROW(exact_tour(0, all, 0, d.matrix()), CapExceeded);  // 15 stops besides the start
  all.pop_back();
  EXPECT_NO_THROW(exact_tour(0, all, 0, d.matrix()));
  EXPECT_NEAR(exact_tour(0, all, 0, d.matrix()).cycle_time, 28.0, 1e-9);
}

TEST(ExactTour, OriginOutsideAssignedSet) {
  auto m = random_metric(42, 5);
  std::vector<NodeId> others(m.assigned.begin() + 1, m.assigned.end());
  auto r = exact_tour(0, others, m.origin, m.cost);
  expect_valid_route(r, others, m.origin, m.cost);
}

TEST(RouteCsv, RoundTrip) {
  auto g = PatrolGraph::create(4, {{0, 1, 1.25}, {1, 2, 2}, {2, 3, 0.5}});
  auto d = all_pairs_shortest_paths(g);
  auto fleet = Fleet::at_origins({0, 3});
  auto costs = travel_costs(d, fleet);
  std::vector<Route> routes{nn_tour(0, std::vector<NodeId>{0, 1}, 0, costs.of(0)),
                            nn_tour(1, std::vector<NodeId>{2, 3}, 3, costs.of(1))};
  auto csv = routes_to_csv(routes);
  EXPECT_EQ(csv.substr(0, 26), "agent,seq,node,visit_time\n");
  auto back = routes_from_csv(csv, costs);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].order, routes[k].order);
    EXPECT_EQ(back[k].visit_times, routes[k].visit_times);
    EXPECT_EQ(back[k].cycle_time, routes[k].cycle_time);
  }
}

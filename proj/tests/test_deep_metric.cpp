#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

#include "deepdist/deep_metric.hpp"
#include "deepdist/distance.hpp"
#include "deepdist/errors.hpp"
#include "deepdist/restricted.hpp"
#include "deepdist/seq_sim.hpp"

using namespace deepdist;

TEST_CASE("flow variance on one level") {
  const double tau = std::log(2.0) / 2;  // theta^2 = 1/2
  const Phylogeny t({-1, 0, 0}, {0.0, tau, tau}, {-1, 0, 1});
  const auto flow = homogeneous_flow(t);
  CHECK(flow.value[1] == 0.5);
  CHECK(flow_variance_recursive(t, flow) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(flow_variance_closed_form(t, flow) == doctest::Approx(0.5).epsilon(1e-14));
  const std::vector<double> sigma{1.0, -1.0};
  const auto est = flow_estimator(t, flow, sigma);
  CHECK(est.s == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(est.k_psi == doctest::Approx(0.5));
}

TEST_CASE("zero-length edges: plain average, no excess variance") {
  const auto shape = Phylogeny::homogeneous(2, 1.0);
  const Phylogeny t(shape.parents(), std::vector<double>(7, 0.0), shape.leaf_labels(),
                    ZeroLengthEdges::allow);
  const auto flow = homogeneous_flow(t);
  CHECK(flow_variance_recursive(t, flow) == 0.0);
  const std::vector<double> sigma{1.0, 1.0, -1.0, 1.0};
  CHECK(flow_estimator(t, flow, sigma).s == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("flow variance on a three-level tree at g = 0.25") {
  const auto t = Phylogeny::homogeneous(3, 0.25);
  const auto flow = homogeneous_flow(t);
  const double level_one = 2 * (1 - std::exp(-0.5)) * std::exp(0.5) * 0.25;
  CHECK(level_one == doctest::Approx(0.324).epsilon(1e-3));
  // Closed form by depth: 2^d edges, Theta^-2 = e^{0.5 d}, Psi^2 = 4^-d.
  double expected = 0.0;
  for (int d = 1; d <= 3; ++d) expected += (1 - std::exp(-0.5)) * std::exp(0.5 * d) / std::pow(2.0, d);
  CHECK(flow_variance_closed_form(t, flow) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(flow_variance_recursive(t, flow) - flow_variance_closed_form(t, flow)) < 1e-12);
  CHECK(homogeneous_flow_bound(0.25) == doctest::Approx(5.69).epsilon(1e-3));
  CHECK(flow_variance_recursive(t, flow) < homogeneous_flow_bound(0.25));
}

TEST_CASE("recursion and closed form agree on random trees and flows") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.6), share(0.1, 0.9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = Phylogeny::homogeneous(4, [&](VertexId) { return u(rng); });
    UnitFlow flow{t.root(), std::vector<double>(t.vertex_count(), 0.0)};
    flow.value[0] = 1.0;
    for (VertexId v : t.preorder()) {
      if (t.is_leaf(v)) continue;
      const double s = share(rng);
      flow.value[t.children(v)[0]] = s * flow.value[v];
      flow.value[t.children(v)[1]] = flow.value[v] - flow.value[t.children(v)[0]];
    }
    CHECK(std::abs(flow_variance_recursive(t, flow) - flow_variance_closed_form(t, flow)) < 1e-12);
  }
}

TEST_CASE("flow validation") {
  const auto t = Phylogeny::homogeneous(1, 0.2);
  UnitFlow bad{0, {1.0, 0.7, 0.7}};
  CHECK_THROWS_AS(flow_variance_recursive(t, bad), InputError);
  UnitFlow neg{0, {1.0, 1.5, -0.5}};
  CHECK_THROWS_AS(flow_variance_recursive(t, neg), InputError);
  UnitFlow ok{0, {1.0, 0.5, 0.5}};
  CHECK_THROWS_AS(flow_estimator(t, ok, std::vector<double>{1.0}), InputError);
}

TEST_CASE("weight table bookkeeping") {
  WeightTable w(3);
  const int a = w.add_join(0, 1, 0.5, 0.8);
  const int r = w.add_join(a, 2, 0.9, 1.0);
  CHECK(a == 3);
  CHECK(r == 4);
  CHECK(w.height(r) == 2);
  CHECK(w.cumulative(r, 0) == doctest::Approx(0.45));
  CHECK(w.descendants_at(r, 2) == std::vector<int>{0, 1, 2, 2});
  const auto set = w.averaging_set(r, a);
  REQUIRE(set.size() == 2);
  CHECK(set[0].weight == 0.5);
  CHECK(set[1].theta == doctest::Approx(0.72));
  CHECK_THROWS_AS(w.add_join(0, 2, 0.5, 0.5), InputError);
  CHECK_THROWS_AS(w.cumulative(a, 2), InputError);
  WeightTable w2(2);
  CHECK_THROWS_AS(w2.add_join(0, 1, 0.0, 0.5), InputError);
  std::ostringstream out;
  dump_weight_table(out, w);
  CHECK(out.str().find("node 4 parent -1") != std::string::npos);
}

TEST_CASE("single-pair exponential average telescopes along a path") {
  // ((0:0.2,1:0.3):0.4,(2:0.1,3:0.5):0.6)
  const Phylogeny t({-1, 0, 0, 1, 1, 2, 2}, {0, 0.4, 0.6, 0.2, 0.3, 0.1, 0.5},
                    {-1, -1, -1, 0, 1, 2, 3});
  const auto tau = t.metric();
  WeightTable w(4, WeightSource::exact);
  const int a0 = w.add_join(0, 1, std::exp(-0.2), std::exp(-0.3));
  const int b0 = w.add_join(2, 3, std::exp(-0.1), std::exp(-0.5));
  const double expected = 1.0;  // 0.4 + 0.6
  CHECK(exponential_average({0}, {3}, tau, w, a0, b0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(exponential_average({0, 1}, {2, 3}, tau, w, a0, b0) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(exponential_average({}, {3}, tau, w, a0, b0), InputError);
  CHECK_THROWS_AS(exponential_average({2}, {3}, tau, w, a0, b0), InputError);
}

TEST_CASE("exponential average with unit weights is a plain mean") {
  DistanceMatrix tau(4);
  tau.set(0, 2, 0.5);
  tau.set(0, 3, 1.0);
  tau.set(1, 2, 1.5);
  tau.set(1, 3, infinity);
  const AveragingSet a{{0, 0.5, 1.0}, {1, 0.5, 1.0}}, b{{2, 0.5, 1.0}, {3, 0.5, 1.0}};
  const double mean = (std::exp(-0.5) + std::exp(-1.0) + std::exp(-1.5)) / 4;
  CHECK(exponential_average(a, b, tau) == doctest::Approx(-std::log(mean)).epsilon(1e-14));
  DistanceMatrix far(4, infinity);
  CHECK(exponential_average(a, b, far) == infinity);
}

TEST_CASE("exact tables reproduce same-level distances on a four-level tree") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> units(1, 5);
  const auto t = Phylogeny::homogeneous(4, [&](VertexId) { return 0.05 * units(rng); });
  const auto forest = exact_forest(t, 4);
  const auto model = cfn_model();
  const auto truth = t.metric();
  DistanceMatrix tau(16);
  for (int a = 0; a < 16; ++a)
    for (int b = a + 1; b < 16; ++b)
      tau.set(a, b, tau_hat(exact_correlation(model, truth(a, b)), model.nu()));
  for (int depth = 1; depth <= 3; ++depth) {
    const int first = (1 << depth) - 1, last = (1 << (depth + 1)) - 2;
    for (int u = first; u <= last; ++u)
      for (int v = u + 1; v <= last; ++v) {
        const int a0 = forest.node_of[u], b0 = forest.node_of[v];
        const double expected = t.path_length(u, v);
        for (int dh = 0; dh <= 4 - depth; ++dh) {
          const auto as = forest.table.descendants_at(a0, dh);
          const auto bs = forest.table.descendants_at(b0, dh);
          for (std::size_t j = 0; j < as.size(); ++j) {
            const double got = exponential_average(forest.table.averaging_set(a0, as[j]),
                                                   forest.table.averaging_set(b0, bs[j]), tau);
            REQUIRE(std::abs(got - expected) < 1e-12);
          }
        }
      }
  }
}

TEST_CASE("dense ball selection") {
  auto d = dense_ball_select({{1.0, 1.0, 1.0, 10.0}});
  CHECK(d.value == 1.0);
  CHECK(d.radius == 0.0);
  CHECK(d.index == 0);
  d = dense_ball_select({{2.5, 2.5, 2.5}});
  CHECK(d.value == 2.5);
  CHECK(d.radius == 0.0);
  // Two infinite values are close to each other.
  d = dense_ball_select({{infinity, infinity, infinity, 1.0}});
  CHECK(d.value == infinity);
  CHECK(d.radius == 0.0);
  CHECK_THROWS_AS(dense_ball_select({}), InputError);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> in(0.9, 1.1);
  for (int rep = 0; rep < 50; ++rep) {
    EstimateBag bag;
    for (int i = 0; i < 23; ++i) bag.values.push_back(in(rng));
    for (int i = 0; i < 10; ++i) bag.values.push_back(5.0);
    std::shuffle(bag.values.begin(), bag.values.end(), rng);
    // Oracle: sort the gaps from every centre and take the 22nd smallest.
    double best = infinity, best_value = 0.0;
    for (double c : bag.values) {
      std::vector<double> g;
      for (double x : bag.values) g.push_back(std::abs(x - c));
      std::sort(g.begin(), g.end());
      if (g[21] < best) {
        best = g[21];
        best_value = c;
      }
    }
    d = dense_ball_select(bag);
    CHECK(d.value >= 0.9);
    CHECK(d.value <= 1.1);
    CHECK(d.radius == best);
    CHECK(d.value == best_value);
  }
}

TEST_CASE("diameter test") {
  CHECK(diameter_test({{1.0, 1.0, 1.0, 10.0}}, 1.0, 6.0));
  CHECK_FALSE(diameter_test({{infinity, infinity, infinity}}, 1.0, 6.0));
  CHECK_FALSE(diameter_test({{1.0, 1.0, 5.0, 5.0}}, 1.0, 6.0));
  const double threshold = 1.0 + std::log(2.0);
  CHECK(diameter_test({{threshold}}, 1.0, 6.0));
  CHECK_FALSE(diameter_test({{std::nextafter(threshold, 2.0)}}, 1.0, 6.0));
}

TEST_CASE("rounding to the grid") {
  const auto d = DeepDistance::rounded(0.52, 0.1);
  CHECK(d.units == 5);
  CHECK(d.value() == doctest::Approx(0.5));
  CHECK(DeepDistance::rounded(-0.04, 0.1).value() == 0.0);
  CHECK(DeepDistance::far(0.1).value() == infinity);
  CHECK_FALSE(DeepDistance::far(0.1).finite());
  CHECK(DeepDistance::rounded(infinity, 0.1) == DeepDistance::far(0.1));
  // A bag that fails the diameter test is far whatever its centre.
  const std::vector<AveragingSet> a{{{0, 1.0, 1.0}}}, b{{{1, 1.0, 1.0}}};
  DistanceMatrix tau(2);
  tau.set(0, 1, 0.52);
  CHECK(deep_distance_from_sets(a, b, tau, 1.0, 6.0, 0.1).units == 5);
  tau.set(0, 1, 3.0);
  CHECK_FALSE(deep_distance_from_sets(a, b, tau, 1.0, 6.0, 0.1).finite());
}

TEST_CASE("three-point weights") {
  CHECK(three_point_weight(2.0, 3.0, 3.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(three_point_weight(0.7, 0.4, 1.1) == doctest::Approx(1.0).epsilon(1e-15));
  // 4-leaf tree, pendant edges 0.25, internal 0.25: a,b siblings, c across.
  CHECK(three_point_weight(0.5, 0.75, 0.75) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
  CHECK(three_point_weight(0.2, 0.1, 0.9) == 1.0);  // negative length capped
  CHECK_THROWS_AS(three_point_weight(1.0, infinity, 1.0), UndefinedWeightError);
  CHECK_THROWS_AS(three_point_weight(DeepDistance::rounded(1.0, 0.05), DeepDistance::far(0.05),
                                     DeepDistance::rounded(1.0, 0.05)),
                  UndefinedWeightError);
}

TEST_CASE("deep config") {
  DeepConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.delta_h(16, 5) == 3);
  CHECK(cfg.delta_h(8, 5) == 2);
  CHECK(cfg.delta_h(64, 5) == 3);
  CHECK(cfg.delta_h(64, 1) == 1);
  CHECK(cfg.delta_h(2, 1) == 0);
  CHECK(cfg.diameter_bound(3) == doctest::Approx(1.05));
  cfg.D = 2.0;
  CHECK(cfg.diameter_bound(3) == 2.0);
  auto bad = [](auto edit) {
    DeepConfig c;
    edit(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](DeepConfig& c) { c.g = 0.35; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DeepConfig& c) { c.f = 0.3; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DeepConfig& c) { c.delta = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DeepConfig& c) { c.W = 5.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DeepConfig& c) { c.alpha = 1.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](DeepConfig& c) { c.D = 1.0; }).validate(), ConfigError);
}

TEST_CASE("deep distances among siblings at depth three under noise") {
  // Two height-3 siblings, edges 0.25, CFN, delta 0.05: the pair is 0.5 apart.
  // Only the 16 leaves below them matter and delta_h(16, 3) = delta_h(64, 3),
  // so the four-level tree stands in for the six-level one.
  const auto t = Phylogeny::homogeneous(4, 0.25);
  const auto forest = exact_forest(t, 4);
  const auto model = cfn_model();
  DeepConfig cfg;
  REQUIRE(cfg.delta_h(16, 3) == cfg.delta_h(64, 3));
  const int a0 = forest.node_of[1], b0 = forest.node_of[2];
  REQUIRE(forest.table.height(a0) == 3);
  int exact = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const auto tau =
        all_pairs_distances(sample_alignment(t, model, 200000, 1000 + trial), model.nu());
    const auto d = deep_distance(forest.table, a0, b0, tau, cfg);
    exact += d.finite() && d.units == 10;
  }
  CHECK(exact >= 95);
}

TEST_CASE("distorted metric on restricted subtrees") {
  const auto t = Phylogeny::homogeneous(4, [](VertexId v) { return 0.05 * (1 + v % 4); });
  const auto tau = t.metric();
  DeepConfig cfg;
  cfg.D = 50.0;
  auto leaves = [&](std::initializer_list<int> ls) {
    std::vector<VertexId> v;
    for (int l : ls) v.push_back(t.leaf_vertex(l));
    return restrict_to(t, v);
  };
  SUBCASE("dangling subtrees") {
    const auto t1 = leaves({0, 1, 2, 3}), t2 = leaves({4, 6});
    REQUIRE(classify_subtree_pair(t, t1, t2).dangling);
    const double d = distorted_metric_general(t, t1, t2, tau, cfg);
    CHECK(d == doctest::Approx(t.path_length(t1.root(), t2.root())).epsilon(1e-12));
  }
  SUBCASE("one perturbed child pair") {
    const auto t1 = leaves({0, 1}), t2 = leaves({2, 3});
    DistanceMatrix bumped = tau;
    bumped.set(0, 2, tau(0, 2) + cfg.delta);
    CHECK(distorted_metric_general(t, t1, t2, tau, cfg) ==
          doctest::Approx(t.path_length(t1.root(), t2.root())).epsilon(1e-12));
    CHECK(distorted_metric_general(t, t1, t2, bumped, cfg) == infinity);
  }
  SUBCASE("edge-sharing subtrees are rejected") {
    CHECK_THROWS_AS(distorted_metric_general(t, leaves({0, 2}), leaves({1, 3}), tau, cfg),
                    InputError);
  }
  SUBCASE("small diameter bound makes far subtrees infinite") {
    // Leaves 0 and 14 are 2.0 apart, beyond D + ln(W/3) = 1.74.
    const auto wide = Phylogeny::homogeneous(4, 0.25);
    const auto t1 = restrict_to(wide, {wide.leaf_vertex(0), wide.leaf_vertex(1)});
    const auto t2 = restrict_to(wide, {wide.leaf_vertex(14), wide.leaf_vertex(15)});
    CHECK(distorted_metric_general(wide, t1, t2, wide.metric(), DeepConfig{}) == infinity);
  }
}

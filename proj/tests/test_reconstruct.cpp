#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "deepdist/errors.hpp"
#include "deepdist/harness.hpp"
#include "deepdist/newick.hpp"
#include "deepdist/reconstruct.hpp"
#include "deepdist/splits.hpp"

using namespace deepdist;

namespace {

DeepDistanceTable table_from(const DistanceMatrix& m, double delta) {
  DeepDistanceTable t(m.size(), delta);
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j) t.set(i, j, DeepDistance::rounded(m(i, j), delta));
  return t;
}

Phylogeny delta_tree(int h, std::uint64_t seed) {
  ExperimentConfig cfg;
  std::mt19937_64 rng(seed);
  return generate_phylogeny(cfg, 1 << h, rng);
}

void check_exact_recovery(const Phylogeny& truth, const ReconstructionResult& r) {
  REQUIRE(r.ok());
  CHECK(unrooted_equal(*r.tree, truth));
  const auto want = unrooted_edge_lengths(truth);
  const auto got = unrooted_edge_lengths(*r.tree);
  REQUIRE(want.size() == got.size());
  for (const auto& [split, len] : want) CHECK(std::abs(got.at(split) - len) < 1e-12);
}

}  // namespace

TEST_CASE("deep four-point test on exact distances") {
  // ab|cd, pendant 0.25, internal 0.1.
  DistanceMatrix m(4);
  m.set(0, 1, 0.5);
  m.set(2, 3, 0.5);
  for (int x : {0, 1})
    for (int y : {2, 3}) m.set(x, y, 0.6);
  const auto d = table_from(m, 0.05);
  CHECK(deep_four_point(d, 0, 1, 2, 3, 0.05));
  CHECK_FALSE(deep_four_point(d, 0, 2, 1, 3, 0.05));
  CHECK_FALSE(deep_four_point(d, 0, 3, 1, 2, 0.05));
  CHECK_FALSE(deep_four_point(d, 0, 1, 2, 3, 0.2));  // needs F > f/2
  auto far = d;
  far.set(1, 3, DeepDistance::far(0.05));
  CHECK_FALSE(deep_four_point(far, 0, 1, 2, 3, 0.05));
  CHECK_THROWS_AS(deep_four_point(d, 0, 1, 1, 3, 0.05), InputError);
}

TEST_CASE("diameter bits of a set") {
  DeepDistanceTable d(3, 0.1);
  d.set(0, 1, DeepDistance::rounded(0.3, 0.1));
  d.set(0, 2, DeepDistance::rounded(0.3, 0.1));
  const std::vector<int> pair{0, 1}, all{0, 1, 2};
  CHECK(sd_set(pair, d));
  CHECK_FALSE(sd_set(all, d));
  d.set(1, 2, DeepDistance::rounded(0.3, 0.1));
  CHECK(sd_set(all, d));
  CHECK_THROWS_AS(sd_set(std::vector<int>{0}, d), InputError);
}

TEST_CASE("cherry picking") {
  auto p = pick_cherries({QuartetSplit::make(10, 11, 12, 13)}, {10, 11, 12, 13});
  CHECK_FALSE(p.failure);
  CHECK(p.pairs == std::vector<std::pair<int, int>>{{10, 11}, {12, 13}});

  p = pick_cherries({QuartetSplit::make(0, 1, 2, 3), QuartetSplit::make(0, 2, 1, 3)}, {0, 1, 2, 3});
  REQUIRE(p.failure);

  // Eight leaves of a random tree with four cherries: all induced splits.
  const auto t = delta_tree(3, 4);
  const auto m = t.metric();
  std::vector<QuartetSplit> splits;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      for (int c = b + 1; c < 8; ++c)
        for (int d = c + 1; d < 8; ++d) splits.push_back(four_point_split(m, a, b, c, d).split);
  std::vector<int> cohort{0, 1, 2, 3, 4, 5, 6, 7};
  p = pick_cherries(splits, cohort);
  CHECK_FALSE(p.failure);
  std::set<std::pair<int, int>> want;
  for (int v = 3; v <= 6; ++v) {
    const auto kids = t.children(v);
    const int x = t.leaf_label(kids[0]), y = t.leaf_label(kids[1]);
    want.insert({std::min(x, y), std::max(x, y)});
  }
  CHECK(std::set<std::pair<int, int>>(p.pairs.begin(), p.pairs.end()) == want);

  p = pick_cherries({QuartetSplit::make(0, 1, 2, 3)}, {0, 1, 2, 3, 4, 5});
  REQUIRE(p.failure);
  CHECK(p.failure->find("no cherry partner") != std::string::npos);
}

TEST_CASE("noiseless reconstruction recovers topology and weights") {
  for (int h : {1, 2, 3}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto truth = delta_tree(h, seed);
      check_exact_recovery(truth, reconstruct_homogeneous(truth.metric(), DeepConfig{}));
    }
  }
}

TEST_CASE("four leaves reduce to the classical four-point test") {
  const auto truth = delta_tree(2, 77);
  const auto r = reconstruct_homogeneous(truth.metric(), DeepConfig{});
  REQUIRE(r.ok());
  const auto q = four_point_split(truth.metric(), 0, 1, 2, 3).split;
  const auto got = four_point_split(r.tree->metric(), 0, 1, 2, 3).split;
  CHECK(q == got);
  REQUIRE(r.levels.size() == 2);
  CHECK(r.levels[0].cohort_size == 4);
  CHECK(r.levels[0].cherries == 2);
}

TEST_CASE("relabelling the leaves relabels the output") {
  const auto truth = delta_tree(4, 3);
  const auto m = truth.metric();
  std::vector<int> perm(16);
  for (int i = 0; i < 16; ++i) perm[i] = (5 * i + 3) % 16;
  const auto r1 = reconstruct_homogeneous(m, DeepConfig{});
  const auto r2 = reconstruct_homogeneous(m.permuted(perm), DeepConfig{});
  REQUIRE(r1.ok());
  REQUIRE(r2.ok());
  CHECK(r1.tree->metric().permuted(perm) == r2.tree->metric());
}

TEST_CASE("failures are reported, not thrown") {
  const auto truth = delta_tree(3, 1);
  DistanceMatrix far(8, infinity);
  for (int i = 0; i < 8; ++i) far.set(i, i, 0.0);
  const auto r = reconstruct_homogeneous(far, DeepConfig{});
  CHECK_FALSE(r.ok());
  REQUIRE(r.failure);
  CHECK(r.failure->level == 0);
  std::ostringstream out;
  write_diagnostics(out, r);
  CHECK(out.str().find("failure level 0") != std::string::npos);

  CHECK_THROWS_AS(reconstruct_homogeneous(DistanceMatrix(6), DeepConfig{}), InputError);
  DeepConfig bad;
  bad.W = 4;
  CHECK_THROWS_AS(reconstruct_homogeneous(truth.metric(), bad), ConfigError);
}

TEST_CASE("trace output") {
  const auto truth = delta_tree(3, 2);
  std::ostringstream trace;
  ReconstructOptions opt;
  opt.trace = &trace;
  const auto r = reconstruct_homogeneous(truth.metric(), opt);
  CHECK(r.ok());
  CHECK(trace.str().find("bag ") != std::string::npos);
  CHECK(trace.str().find("split ") != std::string::npos);
}

TEST_CASE("quartet budget and naive strategy on exact input") {
  const auto truth = delta_tree(4, 6);
  ReconstructOptions opt;
  opt.strategy = DistanceStrategy::naive;
  check_exact_recovery(truth, reconstruct_homogeneous(truth.metric(), opt));
  opt.strategy = DistanceStrategy::deep;
  opt.quartet_budget = 1000;
  check_exact_recovery(truth, reconstruct_homogeneous(truth.metric(), opt));
}

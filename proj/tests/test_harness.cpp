#include <cmath>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include "doctest.h"

#include "deepdist/errors.hpp"
#include "deepdist/harness.hpp"
#include "deepdist/newick.hpp"
#include "deepdist/splits.hpp"

using namespace deepdist;

namespace {

std::string shape_of(const Phylogeny& t) {
  static const std::regex lengths(":[^,);]*");
  return std::regex_replace(to_newick(t), lengths, "");
}

}  // namespace

TEST_CASE("weight support") {
  CHECK(weight_support(0.25, 0.25, 0.25) == std::vector<double>{0.25});
  const auto s = weight_support(0.05, 0.05, 0.25);
  REQUIRE(s.size() == 5);
  CHECK(s[2] == doctest::Approx(0.15));
  CHECK(weight_support(0.1, 0.15, 0.3).size() == 2);
  CHECK_THROWS_AS(weight_support(0.1, 0.12, 0.18), ConfigError);
  CHECK_THROWS_AS(weight_support(0.0, 0.1, 0.2), ConfigError);
}

TEST_CASE("generated phylogenies") {
  ExperimentConfig cfg;
  cfg.deep.delta = cfg.deep.f = cfg.deep.g = 0.25;
  std::mt19937_64 rng(1);
  const auto t = generate_phylogeny(cfg, 16, rng);
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    if (v != t.root()) CHECK(t.branch_length(v) == 0.25);
  }

  ExperimentConfig wide;
  const auto support = weight_support(wide.delta(), wide.f(), wide.g());
  for (auto family : {TreeFamily::homogeneous, TreeFamily::random}) {
    wide.family = family;
    std::mt19937_64 r1(5), r2(5);
    const auto a = generate_phylogeny(wide, 32, r1);
    CHECK(to_newick(a) == to_newick(generate_phylogeny(wide, 32, r2)));
    for (VertexId v = 0; v < a.vertex_count(); ++v) {
      if (v == a.root()) continue;
      CHECK(std::find(support.begin(), support.end(), a.branch_length(v)) != support.end());
    }
  }
  std::mt19937_64 r(0);
  CHECK_THROWS_AS(generate_phylogeny(cfg, 12, r), ConfigError);
}

TEST_CASE("random topologies are uniform over rooted shapes") {
  // 15 rooted binary topologies on 4 labelled leaves.
  ExperimentConfig cfg;
  cfg.family = TreeFamily::random;
  std::mt19937_64 rng(99);
  std::map<std::string, int> counts;
  const int draws = 15000;
  for (int i = 0; i < draws; ++i) ++counts[shape_of(generate_phylogeny(cfg, 4, rng))];
  REQUIRE(counts.size() == 15);
  double chi2 = 0.0;
  for (const auto& [shape, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  // 14 degrees of freedom; the 0.999 quantile is 36.1.
  CHECK(chi2 < 36.1);
}

TEST_CASE("Wilson interval") {
  auto [lo, hi] = wilson_interval(18, 20);
  CHECK(lo == doctest::Approx(0.6990).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.9721).epsilon(1e-3));
  std::tie(lo, hi) = wilson_interval(0, 10);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(0.2775).epsilon(1e-3));
  std::tie(lo, hi) = wilson_interval(10, 10);
  CHECK(hi == doctest::Approx(1.0));
}

TEST_CASE("log-spaced grid") {
  CHECK(log_spaced_grid(100, 100000, 4) == std::vector<long long>{100, 1000, 10000, 100000});
  CHECK(log_spaced_grid(5, 5, 3) == std::vector<long long>{5});
  CHECK_THROWS_AS(log_spaced_grid(10, 5, 3), ConfigError);
}

TEST_CASE("trials") {
  ExperimentConfig cfg;
  cfg.deep.f = cfg.deep.g = 0.25;
  const auto big = run_trial(cfg, 8, 1000000, 0);
  CHECK(big.success);
  CHECK(big.rf_distance == 0);
  CHECK(big.wall_time == 0.0);

  const auto tiny = run_trial(cfg, 8, 1, 0);
  CHECK_FALSE(tiny.success);
  CHECK(tiny.rf_distance != 0);
  CHECK_FALSE(tiny.failure_reason.empty());

  CHECK(run_trial(cfg, 16, 2000, 3) == run_trial(cfg, 16, 2000, 3));
  CHECK(run_trial(cfg, 16, 2000, 3).seed != run_trial(cfg, 16, 2000, 4).seed);

  const auto both = run_trial(cfg, 16, 3000, 1,
                              {{Estimator::eigenvector, DistanceStrategy::deep},
                               {Estimator::logdet, DistanceStrategy::naive}});
  REQUIRE(both.size() == 2);
  CHECK(both[0] == run_trial(cfg, 16, 3000, 1));
}

TEST_CASE("sweep output is a function of the configuration") {
  const auto kv = KeyValueFile::parse(
      "n = 8, 16\nk = 200 5000\ntrials = 4\nseed = 42\nf = 0.25\ng = 0.25\nbaselines = true\n");
  const auto cfg = ExperimentConfig::from_key_values(kv);
  std::vector<std::string> seen;
  const auto rows = sweep(cfg, [&](const SweepRow& r) { seen.push_back(r.estimator); });
  // 2 n x 2 k x (main, cfn, logdet, naive).
  CHECK(rows.size() == 16);
  CHECK(seen.size() == rows.size());
  std::ostringstream a, b;
  write_sweep_csv(a, rows);
  write_sweep_csv(b, sweep(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("#deepdist-sweep v1\nn,k,estimator,success_rate,ci_lo,ci_hi,mean_time", 0) == 0);
  for (const auto& r : rows) {
    CHECK(r.ci_lo <= r.success_rate);
    CHECK(r.success_rate <= r.ci_hi);
  }
  const auto k90 = k_for_success(rows, 8, "eigenvector", 0.9);
  REQUIRE(k90);
  CHECK(*k90 == 5000);
  CHECK_FALSE(k_for_success(rows, 8, "nonexistent", 0.9));
}

TEST_CASE("experiment configuration errors") {
  auto parse = [](const std::string& text) {
    return ExperimentConfig::from_key_values(KeyValueFile::parse(text));
  };
  CHECK_THROWS_AS(parse("trials = 0"), ConfigError);
  CHECK_THROWS_AS(parse("n = 12"), ConfigError);
  CHECK_THROWS_AS(parse("k = 0"), ConfigError);
  CHECK_THROWS_AS(parse("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse("g = 0.4"), ConfigError);
  CHECK_THROWS_AS(parse("model = gtr"), ConfigError);
  CHECK_THROWS_AS(parse("delta = 0.1\nf = 0.12\ng = 0.18"), ConfigError);
  CHECK_THROWS_AS(parse("estimator = ml"), ConfigError);
  CHECK_THROWS_AS(parse("trials = many"), ConfigError);
  CHECK_THROWS_AS(KeyValueFile::parse("just words"), ConfigError);
  const auto cfg = parse("k_min = 100\nk_max = 10000\nk_points = 3\nmodel = binary_asymmetric\n"
                         "model_params = 0.7\nD = 1.5");
  CHECK(cfg.k_grid == std::vector<long long>{100, 1000, 10000});
  CHECK(cfg.build_model().pi()(0) == doctest::Approx(0.7));
  CHECK(cfg.deep.diameter_bound(0) == 1.5);
}

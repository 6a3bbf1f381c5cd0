#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "deepdist/deep_metric.hpp"
#include "deepdist/distance.hpp"
#include "deepdist/gtr.hpp"
#include "deepdist/keyvalue.hpp"
#include "deepdist/phylogeny.hpp"
#include "deepdist/reconstruct.hpp"

namespace deepdist {

enum class TreeFamily {
  homogeneous,  // complete binary tree
  random,       // uniform rooted binary topology
};

struct ExperimentConfig {
  std::string model = "cfn";
  std::vector<double> model_params;
  TreeFamily family = TreeFamily::homogeneous;
  // Edge weights are drawn uniformly from the multiples of delta in [f, g].
  // alpha, W, D, gamma live in deep; deep.delta/f/g mirror the fields below.
  DeepConfig deep;
  std::vector<int> n_grid{32};
  std::vector<long long> k_grid{100, 316, 1000, 3162, 10000, 31623, 100000};
  int trials = 20;
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::eigenvector;
  DistanceStrategy strategy = DistanceStrategy::deep;
  // Companion runs: cfn (two-state models only), logdet and the naive
  // single-pair pipeline.
  bool baselines = false;
  long long quartet_budget = 0;
  // Per-trial wall-clock budget in seconds (0 = none); exceeding it counts as
  // a failure with the timeout flag set.
  double time_budget = 0.0;
  // Wall-clock times are reported only when enabled; otherwise they are 0 so
  // that sweep output is a pure function of the configuration.
  bool record_time = false;

  double delta() const { return deep.delta; }
  double f() const { return deep.f; }
  double g() const { return deep.g; }

  // Throws ConfigError.
  void validate() const;
  RateMatrix build_model() const;

  // Keys: model, model_params, family, delta, f, g, alpha, W, D, gamma, n,
  // k (list) or k_min/k_max/k_points (log-spaced), trials, seed, estimator,
  // strategy, baselines, quartet_budget, time_budget, record_time.
  static ExperimentConfig from_key_values(const KeyValueFile& kv);
  static ExperimentConfig read(const std::string& path);
};

// round(k_min * (k_max/k_min)^(i/(points-1))), deduplicated.
std::vector<long long> log_spaced_grid(long long k_min, long long k_max, int points);

// The multiples of delta in [f, g] (ConfigError if there are none).
std::vector<double> weight_support(double delta, double f, double g);

// A Delta-BM phylogeny with n leaves (n a power of two for the homogeneous
// family), each edge weight drawn independently and uniformly from the
// support.
Phylogeny generate_phylogeny(const ExperimentConfig& cfg, int n, std::mt19937_64& rng);

// Pipeline evaluated within a trial.
struct Pipeline {
  Estimator estimator = Estimator::eigenvector;
  DistanceStrategy strategy = DistanceStrategy::deep;
  std::string name() const;
};

struct TrialResult {
  bool success = false;
  int rf_distance = 0;
  double wall_time = 0.0;
  std::optional<int> failure_level;
  std::string failure_reason;
  bool timed_out = false;
  std::uint64_t seed = 0;
  bool operator==(const TrialResult&) const = default;
};

// Seed of trial `trial` in the (n) cell: mix of master seed, n and index.
std::uint64_t trial_seed(std::uint64_t master, int n, int trial);

// Generate tree -> sample k sites -> estimate distances -> reconstruct ->
// compare unrooted. Every stage is seeded from trial_seed(cfg.seed, n, trial);
// the same tree and alignment are reused across pipelines.
std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, int n, long long k, int trial,
                                   const std::vector<Pipeline>& pipelines);
TrialResult run_trial(const ExperimentConfig& cfg, int n, long long k, int trial);

struct SweepRow {
  int n = 0;
  long long k = 0;
  std::string estimator;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double mean_time = 0.0;
  double mean_rf = 0.0;
  int timeouts = 0;
};

// 95% Wilson score interval.
std::pair<double, double> wilson_interval(int successes, int trials, double z = 1.959963984540054);

// All (n, k) cells over cfg.trials trials; the progress callback (optional)
// is told about every finished cell.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg,
                            const std::function<void(const SweepRow&)>& progress = {});

// Header: n,k,estimator,success_rate,ci_lo,ci_hi,mean_time,trials,successes,mean_rf,timeouts
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Cells where the naive pipeline beats the main pipeline beyond the
// intervals, one message each.
std::vector<std::string> baseline_violations(const std::vector<SweepRow>& rows,
                                             const std::string& main_name);

// Smallest k in the grid whose success rate reaches `target` for this n and
// estimator, if any.
std::optional<long long> k_for_success(const std::vector<SweepRow>& rows, int n,
                                       const std::string& estimator, double target);

}  // namespace deepdist

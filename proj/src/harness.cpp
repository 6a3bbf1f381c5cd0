#include "deepdist/harness.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <map>
#include <ostream>

#include "deepdist/errors.hpp"
#include "deepdist/newick.hpp"
#include "deepdist/rng.hpp"
#include "deepdist/seq_sim.hpp"
#include "deepdist/splits.hpp"

namespace deepdist {

void ExperimentConfig::validate() const {
  if (n_grid.empty() || k_grid.empty()) throw ConfigError("experiment: empty n or k grid");
  if (trials < 1) throw ConfigError("experiment: trials must be at least 1");
  for (int n : n_grid) {
    if (n < 2) throw ConfigError("experiment: n must be at least 2");
    if (family == TreeFamily::homogeneous && (n & (n - 1)) != 0) {
      throw ConfigError("experiment: homogeneous trees need n a power of two");
    }
  }
  for (long long k : k_grid) {
    if (k < 1 || k > INT_MAX) throw ConfigError("experiment: k out of range");
  }
  if (time_budget < 0.0) throw ConfigError("experiment: negative time budget");
  if (quartet_budget < 0) throw ConfigError("experiment: negative quartet budget");
  weight_support(deep.delta, deep.f, deep.g);
  deep.validate();
  build_model();
}

RateMatrix ExperimentConfig::build_model() const {
  try {
    return preset_model(model, model_params);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
}

std::vector<long long> log_spaced_grid(long long k_min, long long k_max, int points) {
  if (k_min < 1 || k_max < k_min || points < 1) throw ConfigError("bad log-spaced grid");
  std::vector<long long> out;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const long long k = std::llround(static_cast<double>(k_min) *
                                     std::pow(static_cast<double>(k_max) / k_min, t));
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValueFile& kv) {
  static const char* known[] = {"model", "model_params", "family", "delta", "f", "g", "alpha",
                                "W", "D", "gamma", "n", "k", "k_min", "k_max", "k_points",
                                "trials", "seed", "estimator", "strategy", "baselines",
                                "quartet_budget", "time_budget", "record_time"};
  for (const auto& [key, value] : kv.entries()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("experiment: unknown key '" + key + "'");
    }
  }
  ExperimentConfig cfg;
  cfg.model = kv.get_or("model", cfg.model);
  cfg.model_params = kv.get_doubles("model_params");
  const std::string family = kv.get_or("family", "homogeneous");
  if (family == "homogeneous") {
    cfg.family = TreeFamily::homogeneous;
  } else if (family == "random") {
    cfg.family = TreeFamily::random;
  } else {
    throw ConfigError("experiment: unknown family '" + family + "'");
  }
  cfg.deep.delta = kv.get_double("delta", cfg.deep.delta);
  cfg.deep.f = kv.get_double("f", cfg.deep.f);
  cfg.deep.g = kv.get_double("g", cfg.deep.g);
  cfg.deep.alpha = kv.get_double("alpha", cfg.deep.alpha);
  cfg.deep.W = kv.get_double("W", cfg.deep.W);
  cfg.deep.gamma = kv.get_double("gamma", cfg.deep.gamma);
  if (kv.has("D")) cfg.deep.D = kv.get_double("D", 0.0);
  if (kv.has("n")) {
    cfg.n_grid.clear();
    for (double n : kv.get_doubles("n")) {
      if (n != std::floor(n)) throw ConfigError("experiment: n must be integers");
      cfg.n_grid.push_back(static_cast<int>(n));
    }
  }
  if (kv.has("k")) {
    cfg.k_grid.clear();
    for (double k : kv.get_doubles("k")) {
      if (k != std::floor(k)) throw ConfigError("experiment: k must be integers");
      cfg.k_grid.push_back(static_cast<long long>(k));
    }
  } else if (kv.has("k_min") || kv.has("k_max") || kv.has("k_points")) {
    cfg.k_grid = log_spaced_grid(kv.get_int("k_min", 100), kv.get_int("k_max", 100000),
                                 static_cast<int>(kv.get_int("k_points", 7)));
  }
  cfg.trials = static_cast<int>(kv.get_int("trials", cfg.trials));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(cfg.seed)));
  cfg.estimator = parse_estimator(kv.get_or("estimator", "eigenvector"));
  const std::string strategy = kv.get_or("strategy", "deep");
  if (strategy == "deep") {
    cfg.strategy = DistanceStrategy::deep;
  } else if (strategy == "naive") {
    cfg.strategy = DistanceStrategy::naive;
  } else {
    throw ConfigError("experiment: unknown strategy '" + strategy + "'");
  }
  cfg.baselines = kv.get_bool("baselines", cfg.baselines);
  cfg.quartet_budget = kv.get_int("quartet_budget", cfg.quartet_budget);
  cfg.time_budget = kv.get_double("time_budget", cfg.time_budget);
  cfg.record_time = kv.get_bool("record_time", cfg.record_time);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::read(const std::string& path) {
  return from_key_values(KeyValueFile::read(path));
}

std::vector<double> weight_support(double delta, double f, double g) {
  if (!(delta > 0.0) || !(f > 0.0)) throw ConfigError("weights: need delta > 0 and f > 0");
  std::vector<double> out;
  const long long lo = static_cast<long long>(std::ceil(f / delta - 1e-9));
  const long long hi = static_cast<long long>(std::floor(g / delta + 1e-9));
  for (long long m = std::max(1LL, lo); m <= hi; ++m) out.push_back(static_cast<double>(m) * delta);
  if (out.empty()) throw ConfigError("weights: no multiple of delta lies in [f, g]");
  return out;
}

namespace {

Phylogeny random_topology(int n, const std::vector<double>& support, std::mt19937_64& rng) {
  // Stepwise insertion on a uniformly chosen edge (the edge above the root
  // included) gives the uniform distribution over rooted labelled topologies.
  std::vector<VertexId> parent{no_vertex};
  std::vector<int> label{0};
  VertexId root = 0;
  for (int leaf = 1; leaf < n; ++leaf) {
    // Edges are named by their lower vertex; the root names the edge above it.
    std::vector<VertexId> edges;
    for (VertexId v = 0; v < static_cast<VertexId>(parent.size()); ++v) edges.push_back(v);
    const VertexId v = edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)];
    const VertexId u = static_cast<VertexId>(parent.size());
    parent.push_back(parent[v]);
    label.push_back(-1);
    parent.push_back(u);
    label.push_back(leaf);
    parent[v] = u;
    if (v == root) root = u;
  }
  std::vector<double> weight(parent.size(), 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  for (VertexId v = 0; v < static_cast<VertexId>(parent.size()); ++v) {
    if (v != root) weight[v] = support[pick(rng)];
  }
  return Phylogeny(std::move(parent), std::move(weight), std::move(label));
}

}  // namespace

Phylogeny generate_phylogeny(const ExperimentConfig& cfg, int n, std::mt19937_64& rng) {
  const auto support = weight_support(cfg.deep.delta, cfg.deep.f, cfg.deep.g);
  if (n < 1) throw ConfigError("generate: n must be positive");
  if (cfg.family == TreeFamily::random) return random_topology(n, support, rng);
  if ((n & (n - 1)) != 0) throw ConfigError("generate: homogeneous trees need n a power of two");
  int h = 0;
  while ((1 << h) < n) ++h;
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  const int vertices = 2 * n - 1;
  std::vector<double> weight(vertices, 0.0);
  for (int v = 1; v < vertices; ++v) weight[v] = support[pick(rng)];
  const Phylogeny shape = Phylogeny::homogeneous(h, [&](VertexId v) { return weight[v]; });
  // Random leaf labels so that nothing downstream can lean on label order.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> labels = shape.leaf_labels();
  for (int& l : labels) {
    if (l >= 0) l = perm[l];
  }
  return Phylogeny(shape.parents(), shape.branch_lengths(), std::move(labels));
}

std::string Pipeline::name() const {
  if (strategy == DistanceStrategy::deep) return estimator_name(estimator);
  if (estimator == Estimator::eigenvector) return "naive";
  return "naive-" + estimator_name(estimator);
}

std::uint64_t trial_seed(std::uint64_t master, int n, int trial) {
  return mix_seed(mix_seed(master, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
}

std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, int n, long long k, int trial,
                                   const std::vector<Pipeline>& pipelines) {
  using clock = std::chrono::steady_clock;
  if (cfg.family != TreeFamily::homogeneous) {
    throw ConfigError("run_trial: reconstruction needs the homogeneous family");
  }
  if (k < 1 || k > INT_MAX) throw ConfigError("run_trial: k out of range");
  const auto start = clock::now();
  const std::uint64_t seed = trial_seed(cfg.seed, n, trial);
  const RateMatrix model = cfg.build_model();
  std::mt19937_64 tree_rng(mix_seed(seed, 1));
  const Phylogeny truth = generate_phylogeny(cfg, n, tree_rng);
  const Alignment alignment = sample_alignment(truth, model, static_cast<int>(k), mix_seed(seed, 2));
  const double shared = std::chrono::duration<double>(clock::now() - start).count();

  std::map<Estimator, DistanceMatrix> cache;
  std::vector<TrialResult> out;
  for (const auto& p : pipelines) {
    const auto t0 = clock::now();
    TrialResult r;
    r.seed = seed;
    r.rf_distance = -1;
    try {
      auto it = cache.find(p.estimator);
      if (it == cache.end()) {
        it = cache.emplace(p.estimator, all_pairs_distances(alignment, model, p.estimator)).first;
      }
      ReconstructOptions opt;
      opt.deep = cfg.deep;
      opt.strategy = p.strategy;
      opt.quartet_budget = cfg.quartet_budget;
      const ReconstructionResult rec = reconstruct_homogeneous(it->second, opt);
      if (rec.tree) {
        r.rf_distance = robinson_foulds(*rec.tree, truth);
        r.success = r.rf_distance == 0;
        if (r.success != unrooted_equal(*rec.tree, truth)) {
          throw std::logic_error("run_trial: RF and split comparison disagree");
        }
        if (!r.success) r.failure_reason = "wrong topology";
      } else {
        r.failure_level = rec.failure->level;
        r.failure_reason = rec.failure->reason;
      }
    } catch (const UnsupportedError& e) {
      r.failure_reason = e.what();
    }
    const double elapsed = shared + std::chrono::duration<double>(clock::now() - t0).count();
    if (cfg.time_budget > 0.0 && elapsed > cfg.time_budget) {
      r.success = false;
      r.timed_out = true;
      r.failure_reason = "time budget exceeded";
    }
    if (cfg.record_time) r.wall_time = elapsed;
    out.push_back(std::move(r));
  }
  return out;
}

TrialResult run_trial(const ExperimentConfig& cfg, int n, long long k, int trial) {
  return run_trial(cfg, n, k, trial, {Pipeline{cfg.estimator, cfg.strategy}}).front();
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double nn = trials;
  const double p = successes / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg,
                            const std::function<void(const SweepRow&)>& progress) {
  cfg.validate();
  std::vector<Pipeline> pipelines{{cfg.estimator, cfg.strategy}};
  if (cfg.baselines) {
    const bool binary = cfg.build_model().phi() == 2;
    const std::vector<Pipeline> extra{{Estimator::cfn, DistanceStrategy::deep},
                                      {Estimator::logdet, DistanceStrategy::deep},
                                      {Estimator::eigenvector, DistanceStrategy::naive}};
    for (const auto& p : extra) {
      if (p.estimator == Estimator::cfn && !binary) continue;
      if (std::none_of(pipelines.begin(), pipelines.end(), [&](const Pipeline& q) {
            return q.name() == p.name();
          })) {
        pipelines.push_back(p);
      }
    }
  }
  std::vector<SweepRow> rows;
  for (int n : cfg.n_grid) {
    for (long long k : cfg.k_grid) {
      std::vector<SweepRow> cell(pipelines.size());
      std::vector<double> rf_sum(pipelines.size(), 0.0);
      std::vector<int> rf_count(pipelines.size(), 0);
      for (int t = 0; t < cfg.trials; ++t) {
        const auto results = run_trial(cfg, n, k, t, pipelines);
        for (std::size_t p = 0; p < pipelines.size(); ++p) {
          auto& row = cell[p];
          row.successes += results[p].success ? 1 : 0;
          row.mean_time += results[p].wall_time;
          row.timeouts += results[p].timed_out ? 1 : 0;
          if (results[p].rf_distance >= 0) {
            rf_sum[p] += results[p].rf_distance;
            ++rf_count[p];
          }
        }
      }
      for (std::size_t p = 0; p < pipelines.size(); ++p) {
        auto& row = cell[p];
        row.n = n;
        row.k = k;
        row.estimator = pipelines[p].name();
        row.trials = cfg.trials;
        row.success_rate = static_cast<double>(row.successes) / cfg.trials;
        std::tie(row.ci_lo, row.ci_hi) = wilson_interval(row.successes, cfg.trials);
        row.mean_time /= cfg.trials;
        row.mean_rf = rf_count[p] ? rf_sum[p] / rf_count[p] : std::nan("");
        if (progress) progress(row);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "#deepdist-sweep v1\nn,k,estimator,success_rate,ci_lo,ci_hi,mean_time,trials,successes,mean_rf,timeouts\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.k << ',' << r.estimator << ',' << format_real(r.success_rate) << ','
        << format_real(r.ci_lo) << ',' << format_real(r.ci_hi) << ',' << format_real(r.mean_time)
        << ',' << r.trials << ',' << r.successes << ',' << format_real(r.mean_rf) << ','
        << r.timeouts << '\n';
  }
}

std::vector<std::string> baseline_violations(const std::vector<SweepRow>& rows,
                                             const std::string& main_name) {
  std::vector<std::string> out;
  for (const auto& naive : rows) {
    if (naive.estimator != "naive") continue;
    for (const auto& main : rows) {
      if (main.estimator == main_name && main.n == naive.n && main.k == naive.k &&
          naive.ci_lo > main.ci_hi) {
        out.push_back("n=" + std::to_string(main.n) + " k=" + std::to_string(main.k) +
                      ": naive pipeline beats " + main_name);
      }
    }
  }
  return out;
}

std::optional<long long> k_for_success(const std::vector<SweepRow>& rows, int n,
                                       const std::string& estimator, double target) {
  std::optional<long long> best;
  for (const auto& r : rows) {
    if (r.n == n && r.estimator == estimator && r.success_rate >= target &&
        (!best || r.k < *best)) {
      best = r.k;
    }
  }
  return best;
}

}  // namespace deepdist

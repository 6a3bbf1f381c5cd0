// deepdist: simulate | distances | reconstruct | sweep | verify
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "deepdist/distance.hpp"
#include "deepdist/errors.hpp"
#include "deepdist/gtr.hpp"
#include "deepdist/harness.hpp"
#include "deepdist/keyvalue.hpp"
#include "deepdist/newick.hpp"
#include "deepdist/reconstruct.hpp"
#include "deepdist/rng.hpp"
#include "deepdist/seq_sim.hpp"
#include "deepdist/verify.hpp"

using namespace deepdist;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

ExperimentConfig load_config(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : ExperimentConfig::read(path);
}

RateMatrix pick_model(const ExperimentConfig& cfg, const std::string& model_file) {
  return model_file.empty() ? cfg.build_model() : read_model_file(model_file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phylogeny reconstruction from deep distance averages"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_tree, sim_model, sim_alignment = "alignment.txt",
                                                sim_truth = "truth.nwk", sim_fasta;
  int sim_n = 32;
  long long sim_k = 10000;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "sample a tree and an alignment on it");
  simulate->add_option("-c,--config", sim_config, "experiment config (model, family, delta, f, g)");
  simulate->add_option("-t,--tree", sim_tree, "use this Newick tree instead of sampling one");
  simulate->add_option("--model-file", sim_model, "model file (overrides the config's model)");
  simulate->add_option("-n,--leaves", sim_n, "number of leaves when sampling the tree");
  simulate->add_option("-k,--sites", sim_k, "alignment length")->check(CLI::PositiveNumber);
  simulate->add_option("-s,--seed", sim_seed, "random seed");
  simulate->add_option("-o,--alignment", sim_alignment, "alignment output");
  simulate->add_option("--truth", sim_truth, "tree output (Newick)");
  simulate->add_option("--fasta", sim_fasta, "also write the alignment as FASTA");

  // distances
  std::string dist_alignment, dist_out = "-", dist_model, dist_config, dist_estimator = "eigenvector";
  auto* distances = app.add_subcommand("distances", "all-pairs distance estimates as CSV");
  distances->add_option("alignment", dist_alignment, "alignment file")->required();
  distances->add_option("-c,--config", dist_config, "experiment config (for the model)");
  distances->add_option("--model-file", dist_model, "model file");
  distances->add_option("-e,--estimator", dist_estimator, "eigenvector | cfn | logdet");
  distances->add_option("-o,--out", dist_out, "CSV output ('-' = stdout)");

  // reconstruct
  std::string rec_matrix, rec_config, rec_out = "-", rec_diag, rec_trace;
  std::optional<double> rec_D;
  auto* reconstruct = app.add_subcommand("reconstruct", "distance CSV to a Newick tree");
  reconstruct->add_option("matrix", rec_matrix, "distance matrix CSV")->required();
  reconstruct->add_option("-c,--config", rec_config, "config with delta, f, g, alpha, W, D, strategy");
  reconstruct->add_option("-D", rec_D, "diameter bound override");
  reconstruct->add_option("-o,--out", rec_out, "Newick output ('-' = stdout)");
  reconstruct->add_option("--diagnostics", rec_diag, "per-level log ('-' = stderr)");
  reconstruct->add_option("--trace", rec_trace, "estimate bags, splits and weights");

  // sweep
  std::string sweep_config, sweep_out = "-";
  bool sweep_quiet = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "success rates over an (n, k) grid");
  sweep_cmd->add_option("config", sweep_config, "experiment config")->required();
  sweep_cmd->add_option("-o,--out", sweep_out, "CSV output ('-' = stdout)");
  sweep_cmd->add_flag("-q,--quiet", sweep_quiet, "no progress on stderr");

  // verify
  std::vector<int> verify_ids;
  bool verify_verbose = false;
  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_option("ids", verify_ids, "criteria to run (default all)")->check(CLI::Range(1, 11));
  verify->add_flag("-v,--verbose", verify_verbose, "per-cell progress on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const auto cfg = load_config(sim_config);
      const auto model = pick_model(cfg, sim_model);
      std::mt19937_64 rng(sim_seed);
      const Phylogeny tree =
          sim_tree.empty() ? generate_phylogeny(cfg, sim_n, rng) : parse_newick(slurp(sim_tree));
      const auto alignment =
          sample_alignment(tree, model, static_cast<int>(sim_k), mix_seed(sim_seed, 1));
      save_alignment(sim_alignment, alignment);
      write_text(sim_truth, to_newick(tree) + "\n");
      if (!sim_fasta.empty()) {
        std::ofstream out(sim_fasta);
        write_fasta(out, alignment);
      }
    } else if (*distances) {
      const auto cfg = load_config(dist_config);
      const auto model = pick_model(cfg, dist_model);
      const auto d =
          all_pairs_distances(load_alignment(dist_alignment), model, parse_estimator(dist_estimator));
      if (dist_out == "-") {
        write_distance_csv(std::cout, d);
      } else {
        save_distance_csv(dist_out, d);
      }
    } else if (*reconstruct) {
      const auto cfg = load_config(rec_config);
      ReconstructOptions opts;
      opts.deep = cfg.deep;
      if (rec_D) opts.deep.D = rec_D;
      opts.deep.validate();
      opts.strategy = cfg.strategy;
      opts.quartet_budget = cfg.quartet_budget;
      std::ofstream trace;
      if (!rec_trace.empty()) {
        trace.open(rec_trace);
        opts.trace = &trace;
      }
      const auto result = reconstruct_homogeneous(load_distance_csv(rec_matrix), opts);
      if (!rec_diag.empty()) {
        if (rec_diag == "-") {
          write_diagnostics(std::cerr, result);
        } else {
          std::ofstream out(rec_diag);
          write_diagnostics(out, result);
        }
      }
      if (!result.ok()) {
        std::ostringstream s;
        write_diagnostics(s, result);
        std::cerr << "reconstruction failed\n" << s.str();
        return 2;
      }
      write_text(rec_out, to_newick(*result.tree) + "\n");
    } else if (*sweep_cmd) {
      const auto cfg = ExperimentConfig::read(sweep_config);
      const auto rows = sweep(cfg, [&](const SweepRow& r) {
        if (!sweep_quiet) {
          std::cerr << "n=" << r.n << " k=" << r.k << " " << r.estimator << ": " << r.successes
                    << "/" << r.trials << "\n";
        }
      });
      if (sweep_out == "-") {
        write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream out(sweep_out);
        write_sweep_csv(out, rows);
      }
      if (cfg.baselines) {
        Pipeline main_pipeline{cfg.estimator, cfg.strategy};
        for (const auto& v : baseline_violations(rows, main_pipeline.name())) {
          std::cerr << "baseline warning: " << v << "\n";
        }
      }
      for (int n : cfg.n_grid) {
        Pipeline main_pipeline{cfg.estimator, cfg.strategy};
        const auto k90 = k_for_success(rows, n, main_pipeline.name(), 0.9);
        std::cerr << "n=" << n << ": k for 90% success = "
                  << (k90 ? std::to_string(*k90) : std::string("not reached")) << "\n";
      }
    } else if (*verify) {
      const auto results =
          run_acceptance(verify_ids, std::cout, verify_verbose ? &std::cerr : nullptr);
      for (const auto& r : results) {
        if (!r.pass) return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

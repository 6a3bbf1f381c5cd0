#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepdist/deep_metric.hpp"
#include "deepdist/metric.hpp"
#include "deepdist/phylogeny.hpp"

namespace deepdist {

// Symmetric table of deep distances between the members of a cohort
// (indexed by position in the cohort).
class DeepDistanceTable {
 public:
  DeepDistanceTable(int size, double delta);
  int size() const { return m_; }
  const DeepDistance& operator()(int i, int j) const { return d_[index(i, j)]; }
  void set(int i, int j, const DeepDistance& d) { d_[index(i, j)] = d; }

 private:
  std::size_t index(int i, int j) const;
  int m_;
  std::vector<DeepDistance> d_;
};

// 1{F(ab|cd) > f/2} with F(ab|cd) = (d(a,c) + d(b,d) - d(a,b) - d(c,d)) / 2,
// and 0 when any of the six distances is infinite.
bool deep_four_point(const DeepDistanceTable& d, int a, int b, int c, int dd, double f);

// All pairwise diameter bits of the members are set.
bool sd_set(std::span<const int> members, const DeepDistanceTable& d);

struct CherryPick {
  std::vector<std::pair<int, int>> pairs;  // sorted, each pair (small, large)
  std::optional<std::string> failure;
};

// Pairs grouped by at least one split of `splits` and separated by none. A
// failure is reported unless these pairs partition the cohort.
CherryPick pick_cherries(const std::vector<QuartetSplit>& splits, const std::vector<int>& cohort);

enum class DistanceStrategy {
  deep,   // averaged over descendants with dense-ball amplification
  naive,  // one leaf pair per internal pair, no averaging
};

struct ReconstructOptions {
  DeepConfig deep;
  DistanceStrategy strategy = DistanceStrategy::deep;
  // Maximum number of quartets any one vertex takes part in per level
  // (0 = unlimited).
  long long quartet_budget = 0;
  // When set, receives the estimate bags, accepted splits and final weight
  // table (see dump_bag and dump_weight_table).
  std::ostream* trace = nullptr;
};

struct LevelDiagnostics {
  int level = 0;
  int cohort_size = 0;
  int delta_h = 0;
  double diameter_bound = 0.0;
  long long finite_pairs = 0;
  long long quartets_tested = 0;
  long long quartets_accepted = 0;
  int cherries = 0;
  // Witness alternatives that would have given a different weight.
  long long witness_disagreements = 0;
};

struct ReconstructionFailure {
  int level = 0;
  std::string reason;
};

struct ReconstructionResult {
  // Output tree, rooted on the final join edge (compare unrooted).
  std::optional<Phylogeny> tree;
  std::optional<ReconstructionFailure> failure;
  std::vector<LevelDiagnostics> levels;

  bool ok() const { return tree.has_value(); }
};

// Cherry picking on a complete binary tree with n = 2^h leaves from the
// estimated leaf distances only. Throws InputError unless n is a power of two
// (n >= 2) and ConfigError on an invalid configuration; statistical failures
// are reported in the result.
ReconstructionResult reconstruct_homogeneous(const DistanceMatrix& distances,
                                             const ReconstructOptions& options);
ReconstructionResult reconstruct_homogeneous(const DistanceMatrix& distances,
                                             const DeepConfig& cfg);

// One line per level plus the outcome.
void write_diagnostics(std::ostream& out, const ReconstructionResult& result);

}  // namespace deepdist

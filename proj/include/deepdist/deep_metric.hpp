#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "deepdist/gtr.hpp"
#include "deepdist/metric.hpp"
#include "deepdist/phylogeny.hpp"
#include "deepdist/restricted.hpp"

namespace deepdist {

// ln sqrt(2): edges shorter than this keep root information alive.
inline constexpr double kKestenStigumBound = 0.34657359027997264;

// ---------------------------------------------------------------------------
// Linear ancestral estimator

// Flow on the edges of the subtree below `root`: value[v] is the flow on the
// edge into v, value[root] = 1. Vertices outside the subtree carry 0.
struct UnitFlow {
  VertexId root = no_vertex;
  std::vector<double> value;
};

// Splits the flow evenly at every internal vertex.
UnitFlow homogeneous_flow(const Phylogeny& tree, VertexId root);
UnitFlow homogeneous_flow(const Phylogeny& tree);

struct FlowEstimate {
  // sum_x Psi(x) sigma_x / Theta(root, x) over the leaves below the root.
  double s = 0.0;
  // Variance excess from the leaf-up recursion.
  double k_psi = 0.0;
};

// leaf_sigmas is indexed by leaf label. Throws InputError when the flow does
// not conserve mass or is negative.
FlowEstimate flow_estimator(const Phylogeny& tree, const UnitFlow& flow,
                            std::span<const double> leaf_sigmas);
// K from the leaf-up recursion alone.
double flow_variance_recursive(const Phylogeny& tree, const UnitFlow& flow);
// K as sum over edges e=(x,y) of (1 - theta_e^2) Theta(root,y)^-2 Psi(e)^2.
double flow_variance_closed_form(const Phylogeny& tree, const UnitFlow& flow);
// 1 / (1 - e^{-2(g* - g)}).
double homogeneous_flow_bound(double g);

// ---------------------------------------------------------------------------
// Reconstructed forest with edge weights theta = e^{-tau}

enum class WeightSource { exact, estimated };

// A leaf reached from an anchor vertex, with its homogeneous-flow weight and
// the cumulative theta from the anchor.
struct AveragingLeaf {
  int leaf = 0;
  double weight = 1.0;
  double theta = 1.0;
};
using AveragingSet = std::vector<AveragingLeaf>;

// Nodes 0..n-1 are the leaves (by label); add_join creates parents n, n+1, ...
class WeightTable {
 public:
  explicit WeightTable(int leaf_count, WeightSource source = WeightSource::estimated);

  int leaf_count() const { return n_; }
  int node_count() const { return static_cast<int>(parent_.size()); }
  bool is_leaf(int x) const { return checked(x) < n_; }
  WeightSource source() const { return source_; }

  // New parent of two current forest roots. Thetas must lie in (0, 1].
  int add_join(int left, int right, double theta_left, double theta_right);

  int parent(int x) const { return parent_[checked(x)]; }
  std::span<const int> children(int x) const { return children_[checked(x)]; }
  // Theta on the edge into x (1 for forest roots).
  double theta(int x) const { return theta_[checked(x)]; }
  // Number of levels below x (0 for leaves).
  int height(int x) const { return height_[checked(x)]; }

  // Product of theta along the path from x down to `leaf`; throws InputError
  // if the leaf is not below x.
  double cumulative(int x, int leaf) const;

  // The 2^depth vertices `depth` levels below x in the tree completed with
  // zero-length edges: a leaf at smaller depth d stands in for 2^(depth-d)
  // slots. Left-to-right order.
  std::vector<int> descendants_at(int x, int depth) const;

  // Leaves below `from` with homogeneous-flow weights (summing to 1) and
  // theta measured from `anchor`, an ancestor of `from`.
  AveragingSet averaging_set(int anchor, int from) const;

 private:
  int checked(int x) const;

  int n_;
  WeightSource source_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<double> theta_;
  std::vector<int> height_;
};

void dump_weight_table(std::ostream& out, const WeightTable& weights);

// Exact weights of a rooted binary phylogeny: leaves keep their labels and
// internal vertices are joined bottom-up. node_of (optional) receives the
// table node of every vertex.
WeightTable exact_weight_table(const Phylogeny& tree, std::vector<int>* node_of = nullptr);

// ---------------------------------------------------------------------------
// Averaging, dense balls, diameter tests

// -ln sum_{a,b} w_a w_b e^{-tau_hat(a,b)} / (theta_a theta_b); +inf when the
// sum is not positive. Weights in each set should sum to one.
double exponential_average(const AveragingSet& a, const AveragingSet& b,
                           const DistanceMatrix& tau_hat);

// Uniform weights over the leaf sets a_leaves, b_leaves, with theta taken from
// the anchors a0, b0 in `weights`. Throws InputError if a leaf is not below
// its anchor or a set is empty.
double exponential_average(const std::vector<int>& a_leaves, const std::vector<int>& b_leaves,
                           const DistanceMatrix& tau_hat, const WeightTable& weights,
                           int a0, int b0);

struct EstimateBag {
  std::vector<double> values;
};

struct DenseBall {
  double value = 0.0;  // the selected estimate
  int index = 0;       // its position in the bag
  double radius = 0.0;
};

// Radius of the smallest ball around each estimate holding at least 2/3 of
// the bag (itself included); the centre with the smallest radius wins, ties
// to the smallest index. Two infinite values are at distance 0, a finite and
// an infinite one at distance +inf. Throws InputError on an empty bag.
DenseBall dense_ball_select(const EstimateBag& bag);

// Strict majority of estimates at most D + ln(W/3).
bool diameter_test(const EstimateBag& bag, double D, double W);

void dump_bag(std::ostream& out, int a0, int b0, const EstimateBag& bag);

// ---------------------------------------------------------------------------
// Deep distances

struct DeepConfig {
  double alpha = 1.5;
  double W = 6.0;
  // Diameter bound; unset means 4.2 g, just above the 4g needed to keep
  // cousins. Larger values let far pairs through and hurt the four-point test.
  std::optional<double> D;
  double gamma = 3.0;
  double delta = 0.05;
  double f = 0.05;
  double g = 0.25;

  // Throws ConfigError unless 0 < delta <= f <= g < ln sqrt 2, W > 5,
  // alpha > 1 and (when set) D > 4g.
  void validate() const;
  // min(level, floor(alpha log2 log2 n)), 0 for n <= 2.
  int delta_h(int n, int level) const;
  double diameter_bound(int delta_h) const;
};

// Multiple of delta (stored as an integer count) or +inf.
struct DeepDistance {
  long long units = 0;
  double delta = 0.0;
  bool sd = false;

  double value() const { return sd ? static_cast<double>(units) * delta : infinity; }
  bool finite() const { return sd; }

  static DeepDistance far(double delta) { return {0, delta, false}; }
  // Nearest multiple of delta (ties away from zero), negatives clamped to 0.
  static DeepDistance rounded(double tau, double delta);

  bool operator==(const DeepDistance&) const = default;
};

// Bag of exponential averages over paired averaging sets (a_sets[j] with
// b_sets[j]), dense-ball selection, diameter test and rounding.
DeepDistance deep_distance_from_sets(const std::vector<AveragingSet>& a_sets,
                                     const std::vector<AveragingSet>& b_sets,
                                     const DistanceMatrix& tau_hat, double D, double W,
                                     double delta, EstimateBag* bag_out = nullptr);

// Deep distance between two forest vertices, averaging from their
// descendants delta_h levels down.
DeepDistance deep_distance(const WeightTable& weights, int a0, int b0, int delta_h,
                           const DistanceMatrix& tau_hat, const DeepConfig& cfg,
                           EstimateBag* bag_out = nullptr);
// Same, with delta_h = cfg.delta_h(n, min height of a0 and b0).
DeepDistance deep_distance(const WeightTable& weights, int a0, int b0,
                           const DistanceMatrix& tau_hat, const DeepConfig& cfg,
                           EstimateBag* bag_out = nullptr);

// exp(-(dab + dac - dbc) / 2), the theta from a to the meeting point of the
// three paths, capped at 1. Throws UndefinedWeightError on an infinite input.
double three_point_weight(double dab, double dac, double dbc);
double three_point_weight(const DeepDistance& dab, const DeepDistance& dac,
                          const DeepDistance& dbc);

// ---------------------------------------------------------------------------
// Subtrees in general position

// Averaging sets for vertex `from` of a restricted subtree, completed with
// zero-length edges to depth delta_h; theta is measured from `anchor` with the
// restricted edge lengths as exact weights. Restricted leaves must be host
// leaves.
std::vector<AveragingSet> subtree_averaging_sets(const Phylogeny& host,
                                                 const RestrictedSubtree& t, VertexId anchor,
                                                 int delta_h);

// Deep distance between a in t1 and b in t2 (each averaged over its own
// subtree).
DeepDistance subtree_deep_distance(const Phylogeny& host, const RestrictedSubtree& t1,
                                   VertexId a, const RestrictedSubtree& t2, VertexId b,
                                   const DistanceMatrix& tau_hat, const DeepConfig& cfg);

// Distance between the roots x1, x2 of two edge-disjoint subtrees, from the
// four deep distances between their children (a leaf root stands for both
// children). Each is shifted by the known lengths to the roots; the result is
// the common value when all four agree exactly, +inf otherwise or when any of
// them is infinite.
double distorted_metric_general(const Phylogeny& host, const RestrictedSubtree& t1,
                                const RestrictedSubtree& t2, const DistanceMatrix& tau_hat,
                                const DeepConfig& cfg);

}  // namespace deepdist

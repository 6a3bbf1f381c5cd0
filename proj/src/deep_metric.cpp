#include "deepdist/deep_metric.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "deepdist/errors.hpp"
#include "deepdist/newick.hpp"

namespace deepdist {

// ---------------------------------------------------------------------------
// Linear ancestral estimator

namespace {

constexpr double kFlowTolerance = 1e-12;

// Preorder of the subtree below root.
std::vector<VertexId> subtree_preorder(const Phylogeny& tree, VertexId root) {
  std::vector<VertexId> order;
  std::vector<VertexId> stack{root};
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto kids = tree.children(v);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

void check_flow(const Phylogeny& tree, const UnitFlow& flow) {
  if (static_cast<int>(flow.value.size()) != tree.vertex_count()) {
    throw InputError("flow: one value per vertex required");
  }
  if (std::abs(flow.value.at(flow.root) - 1.0) > kFlowTolerance) {
    throw InputError("flow: the root must emit unit flow");
  }
  for (VertexId v : subtree_preorder(tree, flow.root)) {
    if (!(flow.value[v] >= 0.0)) throw InputError("flow: negative or undefined value");
    if (tree.is_leaf(v)) continue;
    double out = 0.0;
    for (VertexId c : tree.children(v)) out += flow.value[c];
    if (std::abs(out - flow.value[v]) > kFlowTolerance) {
      throw InputError("flow: mass is not conserved at vertex " + std::to_string(v));
    }
  }
}

double edge_theta(const Phylogeny& tree, VertexId v) {
  return std::exp(-tree.branch_length(v));
}

}  // namespace

UnitFlow homogeneous_flow(const Phylogeny& tree, VertexId root) {
  UnitFlow flow{root, std::vector<double>(tree.vertex_count(), 0.0)};
  flow.value.at(root) = 1.0;
  for (VertexId v : subtree_preorder(tree, root)) {
    const auto kids = tree.children(v);
    for (VertexId c : kids) flow.value[c] = flow.value[v] / static_cast<double>(kids.size());
  }
  return flow;
}

UnitFlow homogeneous_flow(const Phylogeny& tree) { return homogeneous_flow(tree, tree.root()); }

double flow_variance_recursive(const Phylogeny& tree, const UnitFlow& flow) {
  check_flow(tree, flow);
  const auto order = subtree_preorder(tree, flow.root);
  std::vector<double> k(tree.vertex_count(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId u = *it;
    if (tree.is_leaf(u)) continue;
    double acc = 0.0;
    for (VertexId v : tree.children(u)) {
      const double psi = flow.value[u] > 0.0 ? flow.value[v] / flow.value[u] : 0.0;
      const double theta2 = edge_theta(tree, v) * edge_theta(tree, v);
      acc += ((1.0 - theta2) + k[v]) * (psi * psi / theta2);
    }
    k[u] = acc;
  }
  return k[flow.root];
}

double flow_variance_closed_form(const Phylogeny& tree, const UnitFlow& flow) {
  check_flow(tree, flow);
  double total = 0.0;
  for (VertexId y : subtree_preorder(tree, flow.root)) {
    if (y == flow.root) continue;
    const double theta2 = edge_theta(tree, y) * edge_theta(tree, y);
    const double big_theta = std::exp(-tree.path_length(flow.root, y));
    total += (1.0 - theta2) / (big_theta * big_theta) * flow.value[y] * flow.value[y];
  }
  return total;
}

FlowEstimate flow_estimator(const Phylogeny& tree, const UnitFlow& flow,
                            std::span<const double> leaf_sigmas) {
  if (static_cast<int>(leaf_sigmas.size()) != tree.leaf_count()) {
    throw InputError("flow_estimator: one sigma per leaf required");
  }
  FlowEstimate out;
  out.k_psi = flow_variance_recursive(tree, flow);
  for (VertexId x : subtree_preorder(tree, flow.root)) {
    if (!tree.is_leaf(x)) continue;
    const double big_theta = std::exp(-tree.path_length(flow.root, x));
    out.s += flow.value[x] * leaf_sigmas[tree.leaf_label(x)] / big_theta;
  }
  return out;
}

double homogeneous_flow_bound(double g) {
  return 1.0 / (1.0 - std::exp(-2.0 * (kKestenStigumBound - g)));
}

// ---------------------------------------------------------------------------
// WeightTable

WeightTable::WeightTable(int leaf_count, WeightSource source)
    : n_(leaf_count),
      source_(source),
      parent_(leaf_count, -1),
      children_(leaf_count),
      theta_(leaf_count, 1.0),
      height_(leaf_count, 0) {
  if (leaf_count < 1) throw InputError("weight table: need at least one leaf");
}

int WeightTable::checked(int x) const {
  if (x < 0 || x >= static_cast<int>(parent_.size())) {
    throw InputError("weight table: unknown node " + std::to_string(x));
  }
  return x;
}

int WeightTable::add_join(int left, int right, double theta_left, double theta_right) {
  checked(left);
  checked(right);
  if (left == right || parent_[left] != -1 || parent_[right] != -1) {
    throw InputError("weight table: can only join two distinct forest roots");
  }
  for (double t : {theta_left, theta_right}) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("weight table: theta must lie in (0, 1]");
  }
  const int z = static_cast<int>(parent_.size());
  parent_.push_back(-1);
  children_.push_back({left, right});
  theta_.push_back(1.0);
  height_.push_back(1 + std::max(height_[left], height_[right]));
  parent_[left] = z;
  parent_[right] = z;
  theta_[left] = theta_left;
  theta_[right] = theta_right;
  return z;
}

double WeightTable::cumulative(int x, int leaf) const {
  checked(x);
  double product = 1.0;
  for (int v = checked(leaf); v != x; v = parent_[v]) {
    if (v == -1) {
      throw InputError("weight table: " + std::to_string(leaf) + " is not below " +
                       std::to_string(x));
    }
    product *= theta_[v];
  }
  return product;
}

std::vector<int> WeightTable::descendants_at(int x, int depth) const {
  checked(x);
  if (depth < 0) throw InputError("weight table: negative depth");
  std::vector<int> out;
  auto walk = [&](auto&& self, int v, int d) -> void {
    if (d == 0 || children_[v].empty()) {
      out.insert(out.end(), std::size_t{1} << d, v);
      return;
    }
    for (int c : children_[v]) self(self, c, d - 1);
  };
  walk(walk, x, depth);
  return out;
}

AveragingSet WeightTable::averaging_set(int anchor, int from) const {
  AveragingSet out;
  auto walk = [&](auto&& self, int v, double weight, double theta) -> void {
    if (children_[v].empty()) {
      out.push_back({v, weight, theta});
      return;
    }
    const double share = weight / static_cast<double>(children_[v].size());
    for (int c : children_[v]) self(self, c, share, theta * theta_[c]);
  };
  walk(walk, from, 1.0, cumulative(anchor, from));
  return out;
}

WeightTable exact_weight_table(const Phylogeny& tree, std::vector<int>* node_of) {
  WeightTable table(tree.leaf_count(), WeightSource::exact);
  std::vector<int> node(tree.vertex_count(), -1);
  const auto& order = tree.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (tree.is_leaf(v)) {
      node[v] = tree.leaf_label(v);
      continue;
    }
    const auto kids = tree.children(v);
    node[v] = table.add_join(node[kids[0]], node[kids[1]], edge_theta(tree, kids[0]),
                             edge_theta(tree, kids[1]));
  }
  if (node_of) *node_of = std::move(node);
  return table;
}

void dump_weight_table(std::ostream& out, const WeightTable& w) {
  out << "#weights nodes " << w.node_count() << " leaves " << w.leaf_count() << " source "
      << (w.source() == WeightSource::exact ? "exact" : "estimated") << '\n';
  for (int x = 0; x < w.node_count(); ++x) {
    out << "node " << x << " parent " << w.parent(x) << " theta " << format_real(w.theta(x))
        << " height " << w.height(x);
    if (!w.children(x).empty()) out << " children " << w.children(x)[0] << ' ' << w.children(x)[1];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Averaging, dense balls, diameter tests

double exponential_average(const AveragingSet& a, const AveragingSet& b,
                           const DistanceMatrix& tau_hat) {
  if (a.empty() || b.empty()) throw InputError("exponential_average: empty leaf set");
  double sum = 0.0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      const double d = tau_hat(x.leaf, y.leaf);
      if (std::isinf(d)) continue;
      sum += x.weight * y.weight * std::exp(-d) / (x.theta * y.theta);
    }
  }
  return sum > 0.0 ? -std::log(sum) : infinity;
}

double exponential_average(const std::vector<int>& a_leaves, const std::vector<int>& b_leaves,
                           const DistanceMatrix& tau_hat, const WeightTable& weights, int a0,
                           int b0) {
  if (a_leaves.empty() || b_leaves.empty()) {
    throw InputError("exponential_average: empty leaf set");
  }
  AveragingSet a, b;
  for (int x : a_leaves) {
    if (!weights.is_leaf(x)) throw InputError("exponential_average: not a leaf");
    a.push_back({x, 1.0 / static_cast<double>(a_leaves.size()), weights.cumulative(a0, x)});
  }
  for (int y : b_leaves) {
    if (!weights.is_leaf(y)) throw InputError("exponential_average: not a leaf");
    b.push_back({y, 1.0 / static_cast<double>(b_leaves.size()), weights.cumulative(b0, y)});
  }
  return exponential_average(a, b, tau_hat);
}

namespace {

double extended_gap(double x, double y) {
  if (std::isinf(x) && std::isinf(y)) return 0.0;
  if (std::isinf(x) || std::isinf(y)) return infinity;
  return std::abs(x - y);
}

}  // namespace

DenseBall dense_ball_select(const EstimateBag& bag) {
  const auto m = bag.values.size();
  if (m == 0) throw InputError("dense_ball_select: empty bag");
  // Smallest count c with c >= 2m/3.
  const std::size_t need = (2 * m + 2) / 3;
  DenseBall best{bag.values[0], 0, infinity};
  std::vector<double> gaps(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) gaps[i] = extended_gap(bag.values[j], bag.values[i]);
    std::nth_element(gaps.begin(), gaps.begin() + (need - 1), gaps.end());
    const double r = gaps[need - 1];
    if (j == 0 || r < best.radius) best = {bag.values[j], static_cast<int>(j), r};
  }
  return best;
}

bool diameter_test(const EstimateBag& bag, double D, double W) {
  const double threshold = D + std::log(W / 3.0);
  std::size_t below = 0;
  for (double v : bag.values) {
    if (v <= threshold) ++below;
  }
  return 2 * below > bag.values.size();
}

void dump_bag(std::ostream& out, int a0, int b0, const EstimateBag& bag) {
  out << "bag " << a0 << ' ' << b0 << ' ' << bag.values.size();
  for (double v : bag.values) out << ' ' << format_real(v);
  out << '\n';
}

// ---------------------------------------------------------------------------
// Deep distances

void DeepConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("deep config: delta must be positive");
  if (!(delta <= f && f <= g)) throw ConfigError("deep config: need delta <= f <= g");
  if (!(g < kKestenStigumBound)) throw ConfigError("deep config: need g < ln sqrt 2");
  if (!(W > 5.0)) throw ConfigError("deep config: need W > 5");
  if (!(alpha > 1.0)) throw ConfigError("deep config: need alpha > 1");
  if (D && !(*D > 4.0 * g)) throw ConfigError("deep config: need D > 4g");
}

int DeepConfig::delta_h(int n, int level) const {
  if (n <= 2) return 0;
  const double cap = std::floor(alpha * std::log2(std::log2(static_cast<double>(n))));
  return std::max(0, std::min(level, static_cast<int>(cap)));
}

double DeepConfig::diameter_bound(int dh) const {
  (void)dh;
  return D ? *D : 4.2 * g;
}

DeepDistance DeepDistance::rounded(double tau, double delta) {
  if (!(delta > 0.0)) throw InputError("deep distance: delta must be positive");
  if (std::isinf(tau) || std::isnan(tau)) return far(delta);
  return {std::max(0LL, std::llround(tau / delta)), delta, true};
}

DeepDistance deep_distance_from_sets(const std::vector<AveragingSet>& a_sets,
                                     const std::vector<AveragingSet>& b_sets,
                                     const DistanceMatrix& tau_hat, double D, double W,
                                     double delta, EstimateBag* bag_out) {
  if (a_sets.empty() || a_sets.size() != b_sets.size()) {
    throw InputError("deep distance: averaging sets must pair up");
  }
  EstimateBag bag;
  bag.values.reserve(a_sets.size());
  for (std::size_t j = 0; j < a_sets.size(); ++j) {
    bag.values.push_back(exponential_average(a_sets[j], b_sets[j], tau_hat));
  }
  DeepDistance out = DeepDistance::far(delta);
  if (diameter_test(bag, D, W)) {
    const DenseBall ball = dense_ball_select(bag);
    out = DeepDistance::rounded(ball.value, delta);
  }
  if (bag_out) *bag_out = std::move(bag);
  return out;
}

DeepDistance deep_distance(const WeightTable& weights, int a0, int b0, int delta_h,
                           const DistanceMatrix& tau_hat, const DeepConfig& cfg,
                           EstimateBag* bag_out) {
  std::vector<AveragingSet> a_sets, b_sets;
  for (int a : weights.descendants_at(a0, delta_h)) a_sets.push_back(weights.averaging_set(a0, a));
  for (int b : weights.descendants_at(b0, delta_h)) b_sets.push_back(weights.averaging_set(b0, b));
  return deep_distance_from_sets(a_sets, b_sets, tau_hat, cfg.diameter_bound(delta_h), cfg.W,
                                 cfg.delta, bag_out);
}

DeepDistance deep_distance(const WeightTable& weights, int a0, int b0,
                           const DistanceMatrix& tau_hat, const DeepConfig& cfg,
                           EstimateBag* bag_out) {
  const int level = std::min(weights.height(a0), weights.height(b0));
  return deep_distance(weights, a0, b0, cfg.delta_h(weights.leaf_count(), level), tau_hat, cfg,
                       bag_out);
}

double three_point_weight(double dab, double dac, double dbc) {
  if (std::isinf(dab) || std::isinf(dac) || std::isinf(dbc)) {
    throw UndefinedWeightError("three_point_weight: infinite deep distance");
  }
  const double length = 0.5 * (dab + dac - dbc);
  return std::exp(-std::max(0.0, length));
}

double three_point_weight(const DeepDistance& dab, const DeepDistance& dac,
                          const DeepDistance& dbc) {
  return three_point_weight(dab.value(), dac.value(), dbc.value());
}

// ---------------------------------------------------------------------------
// Subtrees in general position

namespace {

int restricted_height(const RestrictedSubtree& t, VertexId v) {
  int best = 0;
  for (VertexId c : t.children(v)) best = std::max(best, 1 + restricted_height(t, c));
  return best;
}

}  // namespace

std::vector<AveragingSet> subtree_averaging_sets(const Phylogeny& host,
                                                 const RestrictedSubtree& t, VertexId anchor,
                                                 int delta_h) {
  if (!t.contains(anchor)) throw InputError("averaging sets: anchor not in subtree");
  std::vector<VertexId> slots;
  auto expand = [&](auto&& self, VertexId v, int d) -> void {
    if (d == 0 || t.children(v).empty()) {
      slots.insert(slots.end(), std::size_t{1} << d, v);
      return;
    }
    for (VertexId c : t.children(v)) self(self, c, d - 1);
  };
  expand(expand, anchor, delta_h);

  std::vector<AveragingSet> sets;
  for (VertexId from : slots) {
    AveragingSet set;
    auto walk = [&](auto&& self, VertexId v, double weight) -> void {
      const auto kids = t.children(v);
      if (kids.empty()) {
        if (!host.is_leaf(v)) throw InputError("averaging sets: subtree leaf is not a host leaf");
        set.push_back({host.leaf_label(v), weight, std::exp(-t.path_length(anchor, v))});
        return;
      }
      for (VertexId c : kids) self(self, c, weight / static_cast<double>(kids.size()));
    };
    walk(walk, from, 1.0);
    sets.push_back(std::move(set));
  }
  return sets;
}

DeepDistance subtree_deep_distance(const Phylogeny& host, const RestrictedSubtree& t1,
                                   VertexId a, const RestrictedSubtree& t2, VertexId b,
                                   const DistanceMatrix& tau_hat, const DeepConfig& cfg) {
  const int level = std::max(restricted_height(t1, a), restricted_height(t2, b));
  const int dh = cfg.delta_h(host.leaf_count(), level);
  return deep_distance_from_sets(subtree_averaging_sets(host, t1, a, dh),
                                 subtree_averaging_sets(host, t2, b, dh), tau_hat,
                                 cfg.diameter_bound(dh), cfg.W, cfg.delta);
}

double distorted_metric_general(const Phylogeny& host, const RestrictedSubtree& t1,
                                const RestrictedSubtree& t2, const DistanceMatrix& tau_hat,
                                const DeepConfig& cfg) {
  if (!classify_subtree_pair(host, t1, t2).edge_disjoint) {
    throw InputError("distorted_metric: subtrees must be edge-disjoint");
  }
  auto ends = [](const RestrictedSubtree& t) {
    const auto kids = t.children(t.root());
    if (kids.empty()) return std::array<VertexId, 2>{t.root(), t.root()};
    return std::array<VertexId, 2>{kids[0], kids[1]};
  };
  auto half_units = [&](const RestrictedSubtree& t, VertexId v) {
    return std::llround(2.0 * t.length_to_parent(v) / cfg.delta);
  };
  // Shifted distances in units of delta / 2; order (y1,y2) (y1,z2) (z1,y2) (z1,z2).
  std::vector<long long> shifted;
  for (VertexId a : ends(t1)) {
    for (VertexId b : ends(t2)) {
      const DeepDistance d = subtree_deep_distance(host, t1, a, t2, b, tau_hat, cfg);
      if (!d.finite()) return infinity;
      shifted.push_back(2 * d.units - half_units(t1, a) - half_units(t2, b));
    }
  }
  for (long long s : shifted) {
    if (s != shifted.back()) return infinity;
  }
  return std::max(0.0, static_cast<double>(shifted.back()) * cfg.delta / 2.0);
}

}  // namespace deepdist

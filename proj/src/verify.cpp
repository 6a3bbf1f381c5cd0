#include "deepdist/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "deepdist/deep_metric.hpp"
#include "deepdist/distance.hpp"
#include "deepdist/gtr.hpp"
#include "deepdist/harness.hpp"
#include "deepdist/reconstruct.hpp"
#include "deepdist/restricted.hpp"
#include "deepdist/rng.hpp"
#include "deepdist/seq_sim.hpp"
#include "deepdist/splits.hpp"

namespace deepdist {

namespace {

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

std::string rate_with_ci(int successes, int trials) {
  const auto [lo, hi] = wilson_interval(successes, trials);
  return std::to_string(successes) + "/" + std::to_string(trials) + " [" + fmt(lo) + ", " +
         fmt(hi) + "]";
}

// 1. Mean of e^{-tau_hat} for a CFN pair at distance 0.5.
CriterionResult unbiasedness(std::ostream*) {
  const Phylogeny pair({-1, 0, 0}, {0.0, 0.25, 0.25}, {-1, 0, 1});
  const auto model = cfn_model();
  double sum = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto a = sample_alignment(pair, model, 10000, mix_seed(101, r));
    sum += std::exp(-tau_hat(correlation_matrix(a.leaf(0), a.leaf(1), 2), model.nu()));
  }
  const double gap = std::abs(sum / reps - std::exp(-0.5));
  return {1, "estimator unbiasedness", gap < 0.01,
          "|mean e^-tau_hat - e^-0.5| = " + fmt(gap, 2) + " over 200 x k=1e4 (< 0.01)"};
}

// 2. tau_hat with nu = (1,-1) against -ln(1 - 2(F+- + F-+)) on random tables.
CriterionResult cfn_specialisation(std::ostream*) {
  std::mt19937_64 rng(202);
  const auto nu = cfn_model().nu();
  double worst = 0.0;
  int infinite = 0;
  bool agree_inf = true;
  for (int r = 0; r < 1000; ++r) {
    std::uniform_int_distribution<long long> diag(0, 50000), off(0, 20000);
    std::vector<long long> c{diag(rng), off(rng), off(rng), diag(rng)};
    if (c[0] + c[1] + c[2] + c[3] == 0) c[0] = 1;
    const long long k = c[0] + c[1] + c[2] + c[3];
    const double mismatch = static_cast<double>(c[1] + c[2]) / static_cast<double>(k);
    const double arg = 1.0 - 2.0 * mismatch;
    const double want = arg > 0.0 ? -std::log(arg) : infinity;
    const double got = tau_hat(CorrelationMatrix(2, k, c), nu);
    if (std::isinf(want) || std::isinf(got)) {
      agree_inf = agree_inf && std::isinf(want) && std::isinf(got);
      ++infinite;
      continue;
    }
    worst = std::max(worst, std::abs(got - want));
  }
  return {2, "CFN specialisation", agree_inf && worst <= 1e-12,
          "max |diff| = " + fmt(worst, 2) + " over 1000 tables (" + std::to_string(infinite) +
              " infinite, all matched)"};
}

// 3. Normalisation of random reversible rate matrices.
CriterionResult spectrum(std::ostream*) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) {
    const int phi = 2 + r % 3;
    Eigen::VectorXd pi(phi);
    for (int i = 0; i < phi; ++i) pi(i) = u(rng);
    pi /= pi.sum();
    Eigen::MatrixXd q(phi, phi);
    for (int i = 0; i < phi; ++i) {
      for (int j = i + 1; j < phi; ++j) {
        const double s = u(rng);
        q(i, j) = s * pi(j);
        q(j, i) = s * pi(i);
      }
    }
    for (int i = 0; i < phi; ++i) {
      q(i, i) = 0.0;
      q(i, i) = -q.row(i).sum();
    }
    const auto m = build_gtr(q, pi);
    worst = std::max(worst, std::abs(m.eigenvalues()(1) + 1.0));
    for (int i = 0; i < phi; ++i) {
      for (int j = 0; j < phi; ++j) {
        worst = std::max(worst, std::abs(m.pi()(i) * m.q()(i, j) - m.pi()(j) * m.q()(j, i)));
      }
    }
    worst = std::max(worst, std::abs(m.pi().dot(m.nu())));
    worst = std::max(worst, std::abs(m.pi().dot(m.nu().cwiseProduct(m.nu())) - 1.0));
  }
  return {3, "spectrum normalisation", worst < 1e-12,
          "max residual = " + fmt(worst, 2) + " over 100 matrices, phi in {2,3,4} (< 1e-12)"};
}

// 4. Mean, conditional mean and variance of the flow estimator by exact
// enumeration of all state configurations.
CriterionResult flow_enumeration(std::ostream*) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> weight(0.02, 0.6), share(0.1, 0.9), pplus(0.2, 0.8);
  double worst_moment = 0.0, worst_k = 0.0;
  int cases = 0;
  for (int h = 1; h <= 3; ++h) {
    for (int r = 0; r < 20; ++r) {
      const auto tree = Phylogeny::homogeneous(h, [&](VertexId) { return weight(rng); });
      const double p = pplus(rng);
      const RateMatrix model = r % 2 == 0 ? cfn_model() : binary_asymmetric_model(p, 1.0 - p);
      const Eigen::VectorXd pi = model.pi(), nu = model.nu();
      UnitFlow flow = homogeneous_flow(tree);
      if (r % 4 == 3) {
        for (VertexId v : tree.preorder()) {
          if (tree.is_leaf(v)) continue;
          const auto kids = tree.children(v);
          flow.value[kids[0]] = share(rng) * flow.value[v];
          flow.value[kids[1]] = flow.value[v] - flow.value[kids[0]];
        }
      }
      // Two-state channel with Lambda_2 = -1: P_ij(t) = pi_j + (delta_ij - pi_j) e^{-t}.
      auto channel = [&](double t, int i, int j) {
        return pi(j) + ((i == j ? 1.0 : 0.0) - pi(j)) * std::exp(-t);
      };
      const int nv = tree.vertex_count();
      double mean = 0.0, second = 0.0;
      double cond[2] = {0.0, 0.0};
      std::vector<double> sigma(tree.leaf_count());
      for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
        auto state = [&](VertexId v) { return static_cast<int>((mask >> v) & 1u); };
        double prob = pi(state(tree.root()));
        for (VertexId v = 0; v < nv; ++v) {
          if (v != tree.root()) prob *= channel(tree.branch_length(v), state(tree.parent(v)), state(v));
        }
        for (int l = 0; l < tree.leaf_count(); ++l) sigma[l] = nu(state(tree.leaf_vertex(l)));
        const double s = flow_estimator(tree, flow, sigma).s;
        mean += prob * s;
        second += prob * s * s;
        cond[state(tree.root())] += prob * s;
      }
      const double k_rec = flow_variance_recursive(tree, flow);
      const double k_closed = flow_variance_closed_form(tree, flow);
      worst_moment = std::max(worst_moment, std::abs(mean));
      for (int i = 0; i < 2; ++i) {
        worst_moment = std::max(worst_moment, std::abs(cond[i] / pi(i) - nu(i)));
      }
      worst_moment = std::max(worst_moment, std::abs(second - mean * mean - (1.0 + k_rec)));
      worst_k = std::max(worst_k, std::abs(k_rec - k_closed));
      ++cases;
    }
  }
  return {4, "flow estimator by exact enumeration", worst_moment < 1e-9 && worst_k < 1e-12,
          std::to_string(cases) + " trees h<=3: max moment error " + fmt(worst_moment, 2) +
              " (< 1e-9), |K_rec - K_closed| <= " + fmt(worst_k, 2) + " (< 1e-12)"};
}

// 5. K for the homogeneous flow against 1 / (1 - e^{-2(g* - g)}).
CriterionResult flow_bound(std::ostream*) {
  bool ok = true;
  double tightest = 0.0, worst_geometric = 0.0;
  for (int h = 1; h <= 12; ++h) {
    for (int i = 1; i <= 6; ++i) {
      const double g = 0.05 * i;
      const auto tree = Phylogeny::homogeneous(h, g);
      const double k = flow_variance_recursive(tree, homogeneous_flow(tree));
      // Same sum by depth: 2^d edges each (1 - e^{-2g}) e^{2gd} 4^{-d}.
      double geometric = 0.0;
      for (int d = 1; d <= h; ++d) geometric += (1 - std::exp(-2 * g)) * std::pow(std::exp(2 * g) / 2, d);
      worst_geometric = std::max(worst_geometric, std::abs(k - geometric) / geometric);
      const double bound = homogeneous_flow_bound(g);
      ok = ok && k <= bound;
      tightest = std::max(tightest, k / bound);
    }
  }
  ok = ok && worst_geometric < 1e-12;
  return {5, "homogeneous flow variance bound", ok,
          "h <= 12, g in {0.05..0.30}: max K/bound = " + fmt(tightest, 4) +
              ", relative gap to the depth sum " + fmt(worst_geometric, 2)};
}

// 6. Exponential averages on exact tables reproduce same-level distances.
CriterionResult telescoping(std::ostream*) {
  std::mt19937_64 rng(606);
  ExperimentConfig cfg;
  const auto tree = generate_phylogeny(cfg, 16, rng);
  const auto model = cfn_model();
  const auto truth = tree.metric();
  DistanceMatrix tau(16);
  for (int a = 0; a < 16; ++a)
    for (int b = a + 1; b < 16; ++b)
      tau.set(a, b, tau_hat(exact_correlation(model, truth(a, b)), model.nu()));
  std::vector<int> node_of;
  const WeightTable table = exact_weight_table(tree, &node_of);
  double worst = 0.0;
  long long checked = 0;
  for (VertexId u = 0; u < tree.vertex_count(); ++u) {
    for (VertexId v = u + 1; v < tree.vertex_count(); ++v) {
      if (tree.is_leaf(u) || tree.is_leaf(v) || tree.depth(u) != tree.depth(v)) continue;
      const int a0 = node_of[u], b0 = node_of[v];
      const double want = tree.path_length(u, v);
      for (int dh = 0; dh <= table.height(a0); ++dh) {
        const auto as = table.descendants_at(a0, dh), bs = table.descendants_at(b0, dh);
        for (int a : as) {
          for (int b : bs) {
            const double got = exponential_average(table.averaging_set(a0, a),
                                                   table.averaging_set(b0, b), tau);
            worst = std::max(worst, std::abs(got - want));
            ++checked;
          }
        }
      }
    }
  }
  return {6, "telescoping exactness", worst < 1e-12,
          std::to_string(checked) + " averages on an h=4 CFN tree: max error " + fmt(worst, 2) +
              " (< 1e-12)"};
}

// 7. Exact tree metric in, exact tree out.
CriterionResult noiseless(std::ostream*) {
  ExperimentConfig cfg;
  int good = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int h = 3 + i % 3;
    std::mt19937_64 rng(mix_seed(707, i));
    const auto truth = generate_phylogeny(cfg, 1 << h, rng);
    const auto r = reconstruct_homogeneous(truth.metric(), cfg.deep);
    if (!r.ok() || !unrooted_equal(*r.tree, truth)) continue;
    const auto want = unrooted_edge_lengths(truth);
    const auto got = unrooted_edge_lengths(*r.tree);
    double err = 0.0;
    for (const auto& [split, len] : want) err = std::max(err, std::abs(got.at(split) - len));
    worst = std::max(worst, err);
    good += err < 1e-12;
  }
  return {7, "noiseless reconstruction", good == 50,
          std::to_string(good) + "/50 trees (h = 3,4,5) exact, max edge error " + fmt(worst, 2)};
}

// 8. h = 5, CFN, edges 0.25, delta 0.05.
CriterionResult noisy(std::ostream* log) {
  ExperimentConfig cfg;
  cfg.deep.f = cfg.deep.g = 0.25;
  cfg.seed = 808;
  auto rate = [&](long long k) {
    int ok = 0;
    for (int t = 0; t < 20; ++t) ok += run_trial(cfg, 32, k, t).success;
    if (log) *log << "  #8 n=32 k=" << k << ": " << rate_with_ci(ok, 20) << '\n';
    return ok;
  };
  const int high = rate(50000);
  const int low = rate(500);
  return {8, "noisy reconstruction, n = 32", high >= 18 && low < 10,
          "k=5e4: " + rate_with_ci(high, 20) + " (>= 90%), k=500: " + rate_with_ci(low, 20) +
              " (< 50%)"};
}

// Logistic fit of success on ln k; returns (ln k90, its variance).
struct LogisticFit {
  bool ok = false;
  double a = 0.0, b = 0.0;
  double ln_k90 = 0.0, var_ln_k90 = 0.0;
};

LogisticFit fit_logistic(const std::vector<double>& x, const std::vector<int>& succ,
                         const std::vector<int>& trials) {
  LogisticFit f;
  double a = 0.0, b = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-(a + b * x[i])));
      const double w = trials[i] * p * (1 - p);
      ga += succ[i] - trials[i] * p;
      gb += (succ[i] - trials[i] * p) * x[i];
      haa += w;
      hab += w * x[i];
      hbb += w * x[i] * x[i];
    }
    const double det = haa * hbb - hab * hab;
    if (!(det > 0)) return f;
    const double da = (hbb * ga - hab * gb) / det, db = (haa * gb - hab * ga) / det;
    a += da;
    b += db;
    if (std::abs(da) + std::abs(db) < 1e-12) break;
  }
  if (!(b > 0) || !std::isfinite(a)) return f;
  double haa = 0, hab = 0, hbb = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-(a + b * x[i])));
    const double w = trials[i] * p * (1 - p);
    haa += w;
    hab += w * x[i];
    hbb += w * x[i] * x[i];
  }
  const double det = haa * hbb - hab * hab;
  // Inverse Fisher information.
  const double vaa = hbb / det, vab = -hab / det, vbb = haa / det;
  const double target = std::log(9.0);
  f.ok = true;
  f.a = a;
  f.b = b;
  f.ln_k90 = (target - a) / b;
  const double da = -1.0 / b, db = -(target - a) / (b * b);
  f.var_ln_k90 = da * da * vaa + 2 * da * db * vab + db * db * vbb;
  return f;
}

// 9. Sample size for 90% success at n = 16, 32, 64 with every edge 0.25.
CriterionResult scaling(std::ostream* log) {
  ExperimentConfig cfg;
  cfg.deep.delta = cfg.deep.f = cfg.deep.g = 0.25;
  cfg.seed = 909;
  const int trials = 80;
  const std::vector<long long> grid{4000, 5657, 8000, 11314, 16000, 22627, 32000, 45255, 64000};
  std::vector<LogisticFit> fits;
  std::string detail;
  for (int n : {16, 32, 64}) {
    std::vector<double> x;
    std::vector<int> succ, tr;
    int saturated = 0;
    for (long long k : grid) {
      int ok = 0;
      for (int t = 0; t < trials; ++t) ok += run_trial(cfg, n, k, t).success;
      x.push_back(std::log(static_cast<double>(k)));
      succ.push_back(ok);
      tr.push_back(trials);
      if (log) *log << "  #9 n=" << n << " k=" << k << ": " << rate_with_ci(ok, trials) << '\n';
      // Two full cells in a row: larger k adds nothing to the fit.
      saturated = ok == trials ? saturated + 1 : 0;
      if (saturated == 2) break;
    }
    const auto f = fit_logistic(x, succ, tr);
    fits.push_back(f);
    if (!f.ok) {
      return {9, "scaling trend", false, "logistic fit failed for n=" + std::to_string(n)};
    }
    const double sd = std::sqrt(f.var_ln_k90);
    detail += "k90(" + std::to_string(n) + ")=" + fmt(std::exp(f.ln_k90), 3) + " [" +
              fmt(std::exp(f.ln_k90 - 1.96 * sd), 3) + ", " +
              fmt(std::exp(f.ln_k90 + 1.96 * sd), 3) + "]  ";
  }
  const double ln_ratio = fits[2].ln_k90 - fits[0].ln_k90;
  const double sd = std::sqrt(fits[2].var_ln_k90 + fits[0].var_ln_k90);
  detail += "ratio 64/16 = " + fmt(std::exp(ln_ratio), 3) + " [" +
            fmt(std::exp(ln_ratio - 1.96 * sd), 3) + ", " + fmt(std::exp(ln_ratio + 1.96 * sd), 3) +
            "] (< 4)";
  return {9, "scaling trend", std::exp(ln_ratio) < 4.0, detail};
}

// 10. DISTORTEDMETRIC on restricted subtrees of random 16-leaf trees.
CriterionResult distorted(std::ostream*) {
  ExperimentConfig gen;
  gen.family = TreeFamily::random;
  DeepConfig cfg;
  cfg.D = 50.0;
  int dangling = 0, dangling_exact = 0, finite = 0, finite_exact = 0, perturbed = 0,
      perturbed_inf = 0;
  for (int i = 0; i < 100; ++i) {
    std::mt19937_64 rng(mix_seed(1010, i));
    const auto tree = generate_phylogeny(gen, 16, rng);
    const auto tau = tree.metric();
    auto pick_subset = [&](std::vector<int> pool, std::size_t lo, std::size_t hi) {
      std::shuffle(pool.begin(), pool.end(), rng);
      const std::size_t size =
          std::uniform_int_distribution<std::size_t>(lo, std::min(hi, pool.size()))(rng);
      std::vector<VertexId> out;
      for (std::size_t j = 0; j < size; ++j) out.push_back(tree.leaf_vertex(pool[j]));
      return out;
    };
    std::optional<RestrictedSubtree> t1, t2;
    for (int attempt = 0; attempt < 10000 && !t1; ++attempt) {
      std::vector<VertexId> s1, s2;
      // Caterpillars have no two non-nested clades; fall back to random sets.
      if (i % 2 == 0 && attempt < 1000) {
        // Two clades that do not nest.
        std::uniform_int_distribution<VertexId> pick(0, tree.vertex_count() - 1);
        const VertexId u = pick(rng), v = pick(rng);
        if (tree.is_leaf(u) || tree.is_leaf(v) || tree.is_ancestor(u, v) ||
            tree.is_ancestor(v, u)) {
          continue;
        }
        s1 = pick_subset(tree.leaves_below(u), 2, 5);
        s2 = pick_subset(tree.leaves_below(v), 2, 5);
      } else {
        std::vector<int> all(16);
        for (int l = 0; l < 16; ++l) all[l] = l;
        std::shuffle(all.begin(), all.end(), rng);
        const auto a = pick_subset(std::vector<int>(all.begin(), all.begin() + 8), 2, 5);
        const auto b = pick_subset(std::vector<int>(all.begin() + 8, all.end()), 2, 5);
        s1 = a;
        s2 = b;
      }
      auto r1 = restrict_to(tree, s1), r2 = restrict_to(tree, s2);
      if (!classify_subtree_pair(tree, r1, r2).edge_disjoint) continue;
      t1 = std::move(r1);
      t2 = std::move(r2);
    }
    if (!t1) {
      return {10, "distorted metric contract", false,
              "no edge-disjoint pair found for instance " + std::to_string(i)};
    }
    const auto cls = classify_subtree_pair(tree, *t1, *t2);
    const double want = tree.path_length(t1->root(), t2->root());
    const double got = distorted_metric_general(tree, *t1, *t2, tau, cfg);
    if (cls.dangling) {
      ++dangling;
      dangling_exact += std::abs(got - want) < 1e-9;
    }
    if (std::isfinite(got)) {
      ++finite;
      finite_exact += std::abs(got - want) < 1e-9;
    }
    // Shift every leaf pair behind one child pair by delta.
    DistanceMatrix bumped = tau;
    auto leaves_of = [](const RestrictedSubtree& t, VertexId v) {
      std::vector<VertexId> out;
      for (VertexId x : t.subtree(v)) {
        if (t.children(x).empty()) out.push_back(x);
      }
      return out;
    };
    for (VertexId x : leaves_of(*t1, t1->children(t1->root())[0])) {
      for (VertexId y : leaves_of(*t2, t2->children(t2->root())[0])) {
        const int a = tree.leaf_label(x), b = tree.leaf_label(y);
        bumped.set(a, b, tau(a, b) + cfg.delta);
      }
    }
    ++perturbed;
    perturbed_inf += std::isinf(distorted_metric_general(tree, *t1, *t2, bumped, cfg));
  }
  const bool ok = dangling > 0 && dangling_exact == dangling && finite_exact == finite &&
                  perturbed_inf == perturbed;
  return {10, "distorted metric contract", ok,
          "dangling exact " + std::to_string(dangling_exact) + "/" + std::to_string(dangling) +
              ", finite returns exact " + std::to_string(finite_exact) + "/" +
              std::to_string(finite) + ", perturbed -> inf " + std::to_string(perturbed_inf) + "/" +
              std::to_string(perturbed)};
}

// 11. Diameter test with D = 1, W = 6 at k = 1e4.
CriterionResult calibration(std::ostream*) {
  // Four levels, edges 0.25, the two root edges 1.2.
  const auto tree =
      Phylogeny::homogeneous(4, [](VertexId v) { return v == 1 || v == 2 ? 1.2 : 0.25; });
  DeepConfig cfg;
  cfg.g = 0.2;  // D must exceed 4g
  cfg.D = 1.0;
  cfg.W = 6.0;
  cfg.validate();
  const double near_limit = 1.0 + std::log(6.0 / 5.0), far_limit = 1.0 + std::log(6.0);
  std::vector<int> node_of;
  const WeightTable table = exact_weight_table(tree, &node_of);
  struct Pair {
    int a0, b0;
    bool near;
  };
  std::vector<Pair> pairs;
  for (VertexId u = 1; u < tree.vertex_count(); ++u) {
    for (VertexId v = u + 1; v < tree.vertex_count(); ++v) {
      if (tree.is_leaf(u) || tree.depth(u) != tree.depth(v)) continue;
      const double t = tree.path_length(u, v);
      if (t < near_limit || t > far_limit) pairs.push_back({node_of[u], node_of[v], t < near_limit});
    }
  }
  const auto model = cfn_model();
  const int trials = 1000;
  std::vector<int> right(pairs.size(), 0);
  for (int t = 0; t < trials; ++t) {
    const auto tau = all_pairs_distances(sample_alignment(tree, model, 10000, mix_seed(1111, t)),
                                         model.nu());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const bool flagged = deep_distance(table, pairs[p].a0, pairs[p].b0, tau, cfg).finite();
      right[p] += flagged == pairs[p].near;
    }
  }
  int near_min = trials, far_min = trials, n_near = 0, n_far = 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p].near) {
      ++n_near;
      near_min = std::min(near_min, right[p]);
    } else {
      ++n_far;
      far_min = std::min(far_min, right[p]);
    }
  }
  const bool ok = n_near > 0 && n_far > 0 && near_min >= 990 && far_min >= 990;
  return {11, "diameter test calibration", ok,
          std::to_string(n_near) + " near pairs: worst " + std::to_string(near_min) + "/1000 flagged 1; " +
              std::to_string(n_far) + " far pairs: worst " + std::to_string(far_min) +
              "/1000 flagged 0 (>= 990)"};
}

}  // namespace

void print_criterion(std::ostream& out, const CriterionResult& r) {
  out << (r.pass ? "PASS" : "FAIL") << "  #" << r.id << ' ' << r.title << ": " << r.detail << " ["
      << fmt(r.seconds, 3) << " s]\n";
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, std::ostream& out,
                                            std::ostream* log) {
  using Check = std::function<CriterionResult(std::ostream*)>;
  const std::vector<Check> checks{unbiasedness, cfn_specialisation, spectrum, flow_enumeration,
                                  flow_bound,   telescoping,        noiseless, noisy,
                                  scaling,      distorted,          calibration};
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = checks[i](log);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    print_criterion(out, r);
    out.flush();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace deepdist

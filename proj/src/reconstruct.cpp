#include "deepdist/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "deepdist/errors.hpp"
#include "deepdist/newick.hpp"

namespace deepdist {

DeepDistanceTable::DeepDistanceTable(int size, double delta)
    : m_(size), d_(static_cast<std::size_t>(size) * size, DeepDistance::far(delta)) {
  if (size < 0) throw InputError("deep distance table: negative size");
}

std::size_t DeepDistanceTable::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= m_ || j >= m_) throw InputError("deep distance table: bad index");
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i) * m_ + j;
}

bool deep_four_point(const DeepDistanceTable& d, int a, int b, int c, int dd, double f) {
  if (a == b || a == c || a == dd || b == c || b == dd || c == dd) {
    throw InputError("deep_four_point: vertices must be distinct");
  }
  const std::array<std::pair<int, int>, 6> pairs{
      {{a, b}, {a, c}, {a, dd}, {b, c}, {b, dd}, {c, dd}}};
  for (auto [x, y] : pairs) {
    if (!d(x, y).finite()) return false;
  }
  const long long twice_f = d(a, c).units + d(b, dd).units - d(a, b).units - d(c, dd).units;
  return static_cast<double>(twice_f) * d(a, b).delta > f;
}

bool sd_set(std::span<const int> members, const DeepDistanceTable& d) {
  if (members.size() < 2) throw InputError("sd_set: need at least two members");
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (!d(members[i], members[j]).finite()) return false;
    }
  }
  return true;
}

CherryPick pick_cherries(const std::vector<QuartetSplit>& splits, const std::vector<int>& cohort) {
  std::map<int, int> position;
  for (int x : cohort) {
    if (!position.emplace(x, static_cast<int>(position.size())).second) {
      throw InputError("pick_cherries: repeated cohort member");
    }
  }
  const int m = static_cast<int>(cohort.size());
  std::vector<char> grouped(static_cast<std::size_t>(m) * m, 0);
  std::vector<char> separated(static_cast<std::size_t>(m) * m, 0);
  auto at = [&](std::vector<char>& table, int x, int y) -> char& {
    return table[static_cast<std::size_t>(position.at(x)) * m + position.at(y)];
  };
  for (const auto& q : splits) {
    const std::array<int, 4> all{q.left[0], q.left[1], q.right[0], q.right[1]};
    for (int x : all) {
      if (!position.count(x)) throw InputError("pick_cherries: split outside the cohort");
    }
    at(grouped, q.left[0], q.left[1]) = at(grouped, q.left[1], q.left[0]) = 1;
    at(grouped, q.right[0], q.right[1]) = at(grouped, q.right[1], q.right[0]) = 1;
    for (int x : q.left) {
      for (int y : q.right) at(separated, x, y) = at(separated, y, x) = 1;
    }
  }
  CherryPick out;
  std::vector<int> partner_count(m, 0);
  std::vector<int> sorted = cohort;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const int x = sorted[i], y = sorted[j];
      if (at(grouped, x, y) && !at(separated, x, y)) {
        out.pairs.emplace_back(x, y);
        ++partner_count[position.at(x)];
        ++partner_count[position.at(y)];
      }
    }
  }
  for (int x : sorted) {
    const int c = partner_count[position.at(x)];
    if (c != 1) {
      out.failure = "vertex " + std::to_string(x) + (c == 0 ? " has no cherry partner"
                                                             : " is in several cherries");
      break;
    }
  }
  return out;
}

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int h = 0;
  while ((1 << h) < n) ++h;
  return h;
}

// Deep (or naive) distances among the cohort.
DeepDistanceTable cohort_distances(const WeightTable& weights, const std::vector<int>& cohort,
                                   int delta_h, const DistanceMatrix& tau_hat,
                                   const ReconstructOptions& opt) {
  const int m = static_cast<int>(cohort.size());
  DeepDistanceTable table(m, opt.deep.delta);
  const double D = opt.deep.diameter_bound(delta_h);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (opt.strategy == DistanceStrategy::deep) {
        EstimateBag bag;
        table.set(i, j,
                  deep_distance(weights, cohort[i], cohort[j], delta_h, tau_hat, opt.deep, &bag));
        if (opt.trace) {
          dump_bag(*opt.trace, cohort[i], cohort[j], bag);
          *opt.trace << "deep " << cohort[i] << ' ' << cohort[j] << ' '
                     << format_real(table(i, j).value()) << '\n';
        }
      } else {
        // First leaf below each vertex, corrected by the weights above it.
        auto first_leaf = [&](int x) {
          while (!weights.is_leaf(x)) x = weights.children(x)[0];
          return x;
        };
        const int a = first_leaf(cohort[i]);
        const int b = first_leaf(cohort[j]);
        const std::vector<AveragingSet> as{{{a, 1.0, weights.cumulative(cohort[i], a)}}};
        const std::vector<AveragingSet> bs{{{b, 1.0, weights.cumulative(cohort[j], b)}}};
        table.set(i, j, deep_distance_from_sets(as, bs, tau_hat, D, opt.deep.W, opt.deep.delta));
      }
    }
  }
  return table;
}

}  // namespace

ReconstructionResult reconstruct_homogeneous(const DistanceMatrix& distances,
                                             const ReconstructOptions& opt) {
  const int n = distances.size();
  if (n < 2 || !is_power_of_two(n)) {
    throw InputError("reconstruct: leaf count must be a power of two (at least 2)");
  }
  opt.deep.validate();
  if (opt.quartet_budget < 0) throw ConfigError("reconstruct: negative quartet budget");
  const int h = log2_exact(n);

  ReconstructionResult result;
  WeightTable weights(n, WeightSource::estimated);
  std::vector<double> length(n, 0.0);  // edge into each node
  std::vector<int> cohort(n);
  for (int i = 0; i < n; ++i) cohort[i] = i;

  for (int level = 0; level + 2 <= h; ++level) {
    const int m = static_cast<int>(cohort.size());
    LevelDiagnostics diag;
    diag.level = level;
    diag.cohort_size = m;
    diag.delta_h = opt.deep.delta_h(n, level);
    diag.diameter_bound = opt.deep.diameter_bound(diag.delta_h);
    const DeepDistanceTable d = cohort_distances(weights, cohort, diag.delta_h, distances, opt);

    std::vector<std::vector<int>> near(m);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (d(i, j).finite()) {
          near[i].push_back(j);
          ++diag.finite_pairs;
        }
      }
    }
    std::vector<char> adjacent(static_cast<std::size_t>(m) * m, 0);
    for (int i = 0; i < m; ++i) {
      for (int j : near[i]) adjacent[i * m + j] = adjacent[j * m + i] = 1;
    }
    std::vector<long long> used(m, 0);
    std::vector<QuartetSplit> accepted;
    for (int a = 0; a < m; ++a) {
      for (int b : near[a]) {
        for (int c : near[b]) {
          if (!adjacent[a * m + c]) continue;
          for (int e : near[c]) {
            if (!adjacent[a * m + e] || !adjacent[b * m + e]) continue;
            if (opt.quartet_budget > 0 &&
                (used[a] >= opt.quartet_budget || used[b] >= opt.quartet_budget ||
                 used[c] >= opt.quartet_budget || used[e] >= opt.quartet_budget)) {
              continue;
            }
            ++used[a], ++used[b], ++used[c], ++used[e];
            ++diag.quartets_tested;
            const int va = cohort[a], vb = cohort[b], vc = cohort[c], ve = cohort[e];
            if (deep_four_point(d, a, b, c, e, opt.deep.f)) {
              accepted.push_back(QuartetSplit::make(va, vb, vc, ve));
            }
            if (deep_four_point(d, a, c, b, e, opt.deep.f)) {
              accepted.push_back(QuartetSplit::make(va, vc, vb, ve));
            }
            if (deep_four_point(d, a, e, b, c, opt.deep.f)) {
              accepted.push_back(QuartetSplit::make(va, ve, vb, vc));
            }
          }
        }
      }
    }
    diag.quartets_accepted = static_cast<long long>(accepted.size());
    if (opt.trace) {
      for (const auto& q : accepted) {
        *opt.trace << "split " << q.left[0] << ' ' << q.left[1] << " | " << q.right[0] << ' '
                   << q.right[1] << '\n';
      }
    }

    const CherryPick pick = pick_cherries(accepted, cohort);
    diag.cherries = static_cast<int>(pick.pairs.size());
    if (pick.failure) {
      if (opt.trace) dump_weight_table(*opt.trace, weights);
      result.levels.push_back(diag);
      result.failure = ReconstructionFailure{level, "cherry partition failed: " + *pick.failure};
      return result;
    }

    std::map<int, int> position;
    for (int i = 0; i < m; ++i) position[cohort[i]] = i;
    std::vector<int> next;
    for (auto [x, y] : pick.pairs) {
      const int px = position[x], py = position[y];
      // Witness: diameter-compatible with both, closest in total.
      int best = -1;
      long long best_units = 0;
      for (int w = 0; w < m; ++w) {
        if (w == px || w == py || !d(px, w).finite() || !d(py, w).finite()) continue;
        const long long total = d(px, w).units + d(py, w).units;
        if (best < 0 || total < best_units) {
          best = w;
          best_units = total;
        }
      }
      if (best < 0) {
        result.levels.push_back(diag);
        result.failure = ReconstructionFailure{
            level, "no witness for cherry (" + std::to_string(x) + ", " + std::to_string(y) + ")"};
        return result;
      }
      auto arm = [&](int p, int q, int w) {
        return std::max(0.0, 0.5 * (d(p, q).value() + d(p, w).value() - d(q, w).value()));
      };
      const double lx = arm(px, py, best);
      const double ly = arm(py, px, best);
      for (int w = 0; w < m; ++w) {
        if (w == px || w == py || w == best || !d(px, w).finite() || !d(py, w).finite()) continue;
        if (arm(px, py, w) != lx || arm(py, px, w) != ly) ++diag.witness_disagreements;
      }
      const int z = weights.add_join(x, y, std::exp(-lx), std::exp(-ly));
      length.resize(z + 1, 0.0);
      length[x] = lx;
      length[y] = ly;
      next.push_back(z);
    }
    result.levels.push_back(diag);
    cohort = std::move(next);
  }

  // Join the last two vertices.
  const int level = h - 1;
  LevelDiagnostics diag;
  diag.level = level;
  diag.cohort_size = 2;
  diag.delta_h = opt.deep.delta_h(n, level);
  diag.diameter_bound = opt.deep.diameter_bound(diag.delta_h);
  const DeepDistanceTable d = cohort_distances(weights, cohort, diag.delta_h, distances, opt);
  diag.finite_pairs = d(0, 1).finite() ? 1 : 0;
  result.levels.push_back(diag);
  if (!d(0, 1).finite()) {
    result.failure = ReconstructionFailure{level, "final join distance is infinite"};
    return result;
  }

  const int root = weights.node_count();
  std::vector<VertexId> parent(root + 1, no_vertex);
  std::vector<double> branch(root + 1, 0.0);
  std::vector<int> label(root + 1, -1);
  for (int x = 0; x < root; ++x) {
    parent[x] = weights.parent(x) == -1 ? root : weights.parent(x);
    branch[x] = x < static_cast<int>(length.size()) ? length[x] : 0.0;
    if (x < n) label[x] = x;
  }
  branch[cohort[0]] = branch[cohort[1]] = d(0, 1).value() / 2.0;
  result.tree = Phylogeny(std::move(parent), std::move(branch), std::move(label),
                          ZeroLengthEdges::allow);
  return result;
}

ReconstructionResult reconstruct_homogeneous(const DistanceMatrix& distances,
                                             const DeepConfig& cfg) {
  ReconstructOptions opt;
  opt.deep = cfg;
  return reconstruct_homogeneous(distances, opt);
}

void write_diagnostics(std::ostream& out, const ReconstructionResult& result) {
  for (const auto& l : result.levels) {
    out << "level " << l.level << " cohort " << l.cohort_size << " delta_h " << l.delta_h
        << " D " << format_real(l.diameter_bound) << " finite_pairs " << l.finite_pairs
        << " quartets " << l.quartets_tested << " accepted " << l.quartets_accepted
        << " cherries " << l.cherries << " witness_disagreements " << l.witness_disagreements
        << '\n';
  }
  if (result.failure) {
    out << "failure level " << result.failure->level << ": " << result.failure->reason << '\n';
  } else {
    out << "success\n";
  }
}

}  // namespace deepdist

#pragma once

// Brute-force references shared by the unit tests. Nothing in here calls into
// the library's own path, split or metric code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "deepdist/phylogeny.hpp"

namespace oracle {

// All-pairs shortest paths on the undirected weighted tree graph.
inline std::vector<std::vector<double>> floyd_warshall(const deepdist::Phylogeny& t) {
  const int nv = t.vertex_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(nv, std::vector<double>(nv, inf));
  for (int v = 0; v < nv; ++v) {
    d[v][v] = 0.0;
    const int p = t.parents()[v];
    if (p >= 0) d[v][p] = d[p][v] = t.branch_lengths()[v];
  }
  for (int k = 0; k < nv; ++k)
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Leaf labels on one side of each edge of the unrooted tree, found by cutting
// the edge and flooding from the child. Returned as the side without label 0,
// deduplicated, trivial sides (size < 2 or > n-2) dropped.
inline std::set<std::vector<int>> split_sets(const deepdist::Phylogeny& t) {
  const int nv = t.vertex_count();
  const int n = t.leaf_count();
  std::vector<std::vector<int>> adj(nv);
  for (int v = 0; v < nv; ++v) {
    const int p = t.parents()[v];
    if (p >= 0) {
      adj[v].push_back(p);
      adj[p].push_back(v);
    }
  }
  std::set<std::vector<int>> out;
  for (int v = 0; v < nv; ++v) {
    const int p = t.parents()[v];
    if (p < 0) continue;
    std::vector<char> seen(nv, 0);
    seen[p] = 1;
    std::vector<int> stack{v};
    seen[v] = 1;
    std::vector<bool> side(n, false);
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (t.leaf_labels()[x] >= 0) side[t.leaf_labels()[x]] = true;
      for (int y : adj[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
    const bool flip = side[0];
    std::vector<int> s;
    for (int l = 0; l < n; ++l) {
      if (side[l] != flip) s.push_back(l);
    }
    if (s.size() >= 2 && static_cast<int>(s.size()) <= n - 2) out.insert(s);
  }
  return out;
}

// The split that T induces on {a,b,c,d}: the pair that is connected by a path
// disjoint from the other pair's path. Encoded as the partner of a.
inline int quartet_partner(const std::vector<std::vector<double>>& d, int va, int vb, int vc,
                           int vd, int b, int c, int dd) {
  const double s1 = d[va][vb] + d[vc][vd];
  const double s2 = d[va][vc] + d[vb][vd];
  const double s3 = d[va][vd] + d[vb][vc];
  if (s1 < s2 && s1 < s3) return b;
  if (s2 < s1 && s2 < s3) return c;
  return dd;
}

// Uniform rooted binary tree on n labelled leaves by random joins, branch
// lengths uniform on [lo, hi].
inline deepdist::Phylogeny random_tree(int n, std::mt19937_64& rng, double lo = 0.1,
                                       double hi = 1.0) {
  std::uniform_real_distribution<double> len(lo, hi);
  std::vector<int> parent(2 * n - 1, -1);
  std::vector<double> branch(2 * n - 1, 0.0);
  std::vector<int> label(2 * n - 1, -1);
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    label[i] = i;
    roots.push_back(i);
  }
  int next = n;
  while (roots.size() > 1) {
    std::uniform_int_distribution<std::size_t> pick(0, roots.size() - 1);
    const std::size_t i = pick(rng);
    const int x = roots[i];
    roots.erase(roots.begin() + static_cast<long>(i));
    std::uniform_int_distribution<std::size_t> pick2(0, roots.size() - 1);
    const std::size_t j = pick2(rng);
    const int y = roots[j];
    parent[x] = parent[y] = next;
    branch[x] = len(rng);
    branch[y] = len(rng);
    roots[j] = next++;
  }
  return deepdist::Phylogeny(parent, branch, label);
}

}  // namespace oracle

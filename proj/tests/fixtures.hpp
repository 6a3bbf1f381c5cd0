#pragma once

#include <cmath>
#include <vector>

#include "deepdist/deep_metric.hpp"
#include "deepdist/phylogeny.hpp"

// Exact weight table for a homogeneous tree built with Phylogeny::homogeneous
// (leaf labels left to right). node_of[v] maps heap vertex v to its table node.
struct ExactForest {
  deepdist::WeightTable table;
  std::vector<int> node_of;
};

inline ExactForest exact_forest(const deepdist::Phylogeny& t, int height) {
  const int n = 1 << height;
  ExactForest out{deepdist::WeightTable(n, deepdist::WeightSource::exact),
                  std::vector<int>(2 * n - 1, -1)};
  for (int v = n - 1; v < 2 * n - 1; ++v) out.node_of[v] = t.leaf_label(v);
  for (int v = n - 2; v >= 0; --v) {
    const int l = 2 * v + 1, r = 2 * v + 2;
    out.node_of[v] = out.table.add_join(out.node_of[l], out.node_of[r],
                                        std::exp(-t.branch_length(l)),
                                        std::exp(-t.branch_length(r)));
  }
  return out;
}

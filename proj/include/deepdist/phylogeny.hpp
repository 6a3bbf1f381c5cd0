#pragma once

#include <functional>
#include <span>
#include <vector>

#include "deepdist/metric.hpp"

namespace deepdist {

using VertexId = int;
inline constexpr VertexId no_vertex = -1;

enum class ZeroLengthEdges { reject, allow };

// Rooted binary leaf-labeled tree with weighted edges. Vertex ids are dense
// indices 0..vertex_count()-1 with no meaning of their own; leaves carry labels
// 0..n-1. The edge into v (from its parent) is identified with v.
//
// The root has two children and every other internal vertex has two children
// (degree 3). The degenerate cases n = 1 (root is the single leaf) and n = 2
// are accepted.
class Phylogeny {
 public:
  // parent[v] == no_vertex for the root only. leaf_label[v] is the label of
  // leaf v and -1 for internal vertices. branch_length[root] is ignored.
  Phylogeny(std::vector<VertexId> parent, std::vector<double> branch_length,
            std::vector<int> leaf_label,
            ZeroLengthEdges zero_edges = ZeroLengthEdges::reject);

  // Complete binary tree with `height` levels. Vertices are numbered in heap
  // order (root 0, children 2v+1 and 2v+2); leaves are labelled left to right.
  static Phylogeny homogeneous(int height,
                               const std::function<double(VertexId)>& weight);
  static Phylogeny homogeneous(int height, double weight);

  int vertex_count() const { return static_cast<int>(parent_.size()); }
  int leaf_count() const { return static_cast<int>(leaf_vertex_.size()); }
  VertexId root() const { return root_; }

  VertexId parent(VertexId v) const { return parent_.at(checked(v)); }
  std::span<const VertexId> children(VertexId v) const {
    return children_.at(checked(v));
  }
  bool is_leaf(VertexId v) const { return leaf_label_.at(checked(v)) >= 0; }
  int leaf_label(VertexId v) const { return leaf_label_.at(checked(v)); }
  VertexId leaf_vertex(int label) const;
  double branch_length(VertexId v) const { return branch_length_.at(checked(v)); }
  int depth(VertexId v) const { return depth_.at(checked(v)); }
  double root_distance(VertexId v) const { return root_distance_.at(checked(v)); }
  bool has_zero_length_edges() const { return has_zero_edges_; }

  VertexId lca(VertexId u, VertexId v) const;
  // Sum of edge weights on the u-v path.
  double path_length(VertexId u, VertexId v) const;
  // Number of edges on the u-v path.
  int edge_count(VertexId u, VertexId v) const;
  // True when `ancestor` lies on the path from v to the root (v included).
  bool is_ancestor(VertexId ancestor, VertexId v) const;

  // Leaf labels below v in left-to-right order.
  std::vector<int> leaves_below(VertexId v) const;
  // Vertices in preorder (parents before children).
  const std::vector<VertexId>& preorder() const { return preorder_; }
  // Undirected neighbours of v.
  std::vector<VertexId> neighbours(VertexId v) const;

  // Leaf-pair path lengths indexed by leaf label.
  DistanceMatrix metric() const;

  const std::vector<VertexId>& parents() const { return parent_; }
  const std::vector<double>& branch_lengths() const { return branch_length_; }
  const std::vector<int>& leaf_labels() const { return leaf_label_; }

 private:
  VertexId checked(VertexId v) const;

  std::vector<VertexId> parent_;
  std::vector<double> branch_length_;
  std::vector<int> leaf_label_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<VertexId> leaf_vertex_;
  std::vector<int> depth_;
  std::vector<double> root_distance_;
  std::vector<VertexId> preorder_;
  VertexId root_ = no_vertex;
  bool has_zero_edges_ = false;
};

}  // namespace deepdist

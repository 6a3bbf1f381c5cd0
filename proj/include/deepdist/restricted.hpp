#pragma once

#include <optional>
#include <span>
#include <vector>

#include "deepdist/phylogeny.hpp"

namespace deepdist {

// The tree spanned by a vertex subset of a host phylogeny, with paths of
// degree-2 vertices contracted (kept vertices and the designated root are
// never contracted). Vertices are referred to by host ids; the edge into a
// vertex carries the host path length it replaces.
class RestrictedSubtree {
 public:
  VertexId root() const { return root_; }
  const std::vector<VertexId>& vertices() const { return vertices_; }
  bool contains(VertexId v) const;
  VertexId parent(VertexId v) const;
  std::span<const VertexId> children(VertexId v) const;
  // Host path length of the contracted edge into v (0 for the root).
  double length_to_parent(VertexId v) const;
  // Restricted leaves (vertices without children), in preorder.
  std::vector<VertexId> leaves() const;
  // Path length inside the restricted tree; equals the host path length.
  double path_length(VertexId u, VertexId v) const;
  // Vertices of the subtree rooted at v (v first), preorder.
  std::vector<VertexId> subtree(VertexId v) const;

  // Rooted full binary: the root has two children (or is the single vertex),
  // every other vertex has zero or two children.
  bool is_legal() const;

  // Host vertices and host edges (identified by child id) on paths between
  // the restricted leaves.
  const std::vector<bool>& span_vertices() const { return span_vertex_; }
  const std::vector<bool>& span_edges() const { return span_edge_; }

 private:
  friend RestrictedSubtree restrict_to(const Phylogeny&, const std::vector<VertexId>&,
                                       std::optional<VertexId>);

  VertexId root_ = no_vertex;
  std::vector<VertexId> vertices_;
  std::vector<VertexId> parent_;                  // by host id
  std::vector<std::vector<VertexId>> children_;   // by host id
  std::vector<double> length_;                    // by host id
  std::vector<bool> member_;                      // by host id
  std::vector<bool> span_vertex_;
  std::vector<bool> span_edge_;
};

// T|keep. Without an explicit root the restricted tree is rooted at the host
// LCA of `keep`; an explicit root must lie on the span and survives
// contraction. Throws InputError on an empty or invalid keep set.
RestrictedSubtree restrict_to(const Phylogeny& tree,
                              const std::vector<VertexId>& keep,
                              std::optional<VertexId> root = std::nullopt);

struct SubtreePairClassification {
  bool edge_disjoint = false;
  bool dangling = false;
  // Where the connecting path meets each subtree's span (set when
  // edge_disjoint).
  std::optional<VertexId> w1;
  std::optional<VertexId> w2;
};

// Edge disjointness of the leaf-to-leaf paths of the two subtrees, and whether
// the connecting path leaves both subtrees at their roots (dangling). Throws
// InputError if either subtree is not legal.
SubtreePairClassification classify_subtree_pair(const Phylogeny& tree,
                                                 const RestrictedSubtree& t1,
                                                 const RestrictedSubtree& t2);

}  // namespace deepdist

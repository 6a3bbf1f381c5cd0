#include "deepdist/phylogeny.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deepdist/errors.hpp"

namespace deepdist {

Phylogeny::Phylogeny(std::vector<VertexId> parent,
                     std::vector<double> branch_length,
                     std::vector<int> leaf_label, ZeroLengthEdges zero_edges)
    : parent_(std::move(parent)),
      branch_length_(std::move(branch_length)),
      leaf_label_(std::move(leaf_label)) {
  const auto nv = parent_.size();
  if (nv == 0) throw InputError("Phylogeny: no vertices");
  if (branch_length_.size() != nv || leaf_label_.size() != nv) {
    throw InputError("Phylogeny: parent/branch_length/leaf_label size mismatch");
  }
  const int count = static_cast<int>(nv);
  children_.assign(nv, {});
  for (int v = 0; v < count; ++v) {
    const VertexId p = parent_[v];
    if (p == no_vertex) {
      if (root_ != no_vertex) throw InputError("Phylogeny: more than one root");
      root_ = v;
      continue;
    }
    if (p < 0 || p >= count || p == v) {
      throw InputError("Phylogeny: invalid parent for vertex " + std::to_string(v));
    }
    children_[p].push_back(v);
    const double w = branch_length_[v];
    if (!std::isfinite(w) || w < 0.0 ||
        (w == 0.0 && zero_edges == ZeroLengthEdges::reject)) {
      throw InputError("Phylogeny: edge weight must be positive (vertex " +
                       std::to_string(v) + ")");
    }
    if (w == 0.0) has_zero_edges_ = true;
  }
  if (root_ == no_vertex) throw InputError("Phylogeny: no root");

  int n = 0;
  for (int v = 0; v < count; ++v) {
    const bool leaf = children_[v].empty();
    if (leaf != (leaf_label_[v] >= 0)) {
      throw InputError("Phylogeny: leaf labels must mark exactly the leaves (vertex " +
                       std::to_string(v) + ")");
    }
    if (!leaf && children_[v].size() != 2) {
      throw InputError("Phylogeny: vertex " + std::to_string(v) +
                       " does not have exactly two children");
    }
    if (leaf) ++n;
  }
  leaf_vertex_.assign(n, no_vertex);
  for (int v = 0; v < count; ++v) {
    const int label = leaf_label_[v];
    if (label < 0) continue;
    if (label >= n || leaf_vertex_[label] != no_vertex) {
      throw InputError("Phylogeny: leaf labels must be a bijection onto 0..n-1");
    }
    leaf_vertex_[label] = v;
  }

  // Preorder walk; also detects cycles / disconnected vertices.
  depth_.assign(nv, -1);
  root_distance_.assign(nv, 0.0);
  preorder_.reserve(nv);
  std::vector<VertexId> stack{root_};
  depth_[root_] = 0;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    preorder_.push_back(v);
    for (auto it = children_[v].rbegin(); it != children_[v].rend(); ++it) {
      const VertexId c = *it;
      if (depth_[c] != -1) throw InputError("Phylogeny: cycle detected");
      depth_[c] = depth_[v] + 1;
      root_distance_[c] = root_distance_[v] + branch_length_[c];
      stack.push_back(c);
    }
  }
  if (preorder_.size() != nv) throw InputError("Phylogeny: tree is not connected");
}

Phylogeny Phylogeny::homogeneous(int height,
                                 const std::function<double(VertexId)>& weight) {
  if (height < 0 || height > 24) throw InputError("Phylogeny::homogeneous: bad height");
  const int nv = (1 << (height + 1)) - 1;
  const int first_leaf = (1 << height) - 1;
  std::vector<VertexId> parent(nv);
  std::vector<double> w(nv, 0.0);
  std::vector<int> label(nv, -1);
  for (int v = 0; v < nv; ++v) {
    parent[v] = v == 0 ? no_vertex : (v - 1) / 2;
    if (v != 0) w[v] = weight(v);
    if (v >= first_leaf) label[v] = v - first_leaf;
  }
  return Phylogeny(std::move(parent), std::move(w), std::move(label));
}

Phylogeny Phylogeny::homogeneous(int height, double weight) {
  return homogeneous(height, [weight](VertexId) { return weight; });
}

VertexId Phylogeny::checked(VertexId v) const {
  if (v < 0 || v >= vertex_count()) {
    throw InputError("Phylogeny: unknown vertex id " + std::to_string(v));
  }
  return v;
}

VertexId Phylogeny::leaf_vertex(int label) const {
  if (label < 0 || label >= leaf_count()) {
    throw InputError("Phylogeny: unknown leaf label " + std::to_string(label));
  }
  return leaf_vertex_[label];
}

VertexId Phylogeny::lca(VertexId u, VertexId v) const {
  checked(u);
  checked(v);
  while (depth_[u] > depth_[v]) u = parent_[u];
  while (depth_[v] > depth_[u]) v = parent_[v];
  while (u != v) {
    u = parent_[u];
    v = parent_[v];
  }
  return u;
}

double Phylogeny::path_length(VertexId u, VertexId v) const {
  if (u == v) {
    checked(u);
    return 0.0;
  }
  // Summing edges along the path (rather than differencing root distances)
  // keeps results bit-identical to an explicit path sum.
  checked(u);
  checked(v);
  double left = 0.0, right = 0.0;
  while (depth_[u] > depth_[v]) { left += branch_length_[u]; u = parent_[u]; }
  while (depth_[v] > depth_[u]) { right += branch_length_[v]; v = parent_[v]; }
  while (u != v) {
    left += branch_length_[u];
    right += branch_length_[v];
    u = parent_[u];
    v = parent_[v];
  }
  return left + right;
}

int Phylogeny::edge_count(VertexId u, VertexId v) const {
  const VertexId m = lca(u, v);
  return depth_[u] + depth_[v] - 2 * depth_[m];
}

bool Phylogeny::is_ancestor(VertexId ancestor, VertexId v) const {
  checked(ancestor);
  checked(v);
  while (depth_[v] > depth_[ancestor]) v = parent_[v];
  return v == ancestor;
}

std::vector<int> Phylogeny::leaves_below(VertexId v) const {
  std::vector<int> out;
  std::vector<VertexId> stack{checked(v)};
  while (!stack.empty()) {
    const VertexId x = stack.back();
    stack.pop_back();
    if (leaf_label_[x] >= 0) out.push_back(leaf_label_[x]);
    for (auto it = children_[x].rbegin(); it != children_[x].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return out;
}

std::vector<VertexId> Phylogeny::neighbours(VertexId v) const {
  std::vector<VertexId> out(children_.at(checked(v)));
  if (parent_[v] != no_vertex) out.push_back(parent_[v]);
  return out;
}

DistanceMatrix Phylogeny::metric() const {
  const int n = leaf_count();
  DistanceMatrix d(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      d.set(a, b, path_length(leaf_vertex_[a], leaf_vertex_[b]));
    }
  }
  return d;
}

}  // namespace deepdist

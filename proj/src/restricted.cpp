#include "deepdist/restricted.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "deepdist/errors.hpp"

namespace deepdist {

bool RestrictedSubtree::contains(VertexId v) const {
  return v >= 0 && v < static_cast<VertexId>(member_.size()) && member_[v];
}

VertexId RestrictedSubtree::parent(VertexId v) const {
  if (!contains(v)) throw InputError("RestrictedSubtree: vertex not in subtree");
  return parent_[v];
}

std::span<const VertexId> RestrictedSubtree::children(VertexId v) const {
  if (!contains(v)) throw InputError("RestrictedSubtree: vertex not in subtree");
  return children_[v];
}

double RestrictedSubtree::length_to_parent(VertexId v) const {
  if (!contains(v)) throw InputError("RestrictedSubtree: vertex not in subtree");
  return length_[v];
}

std::vector<VertexId> RestrictedSubtree::leaves() const {
  std::vector<VertexId> out;
  for (VertexId v : subtree(root_)) {
    if (children_[v].empty()) out.push_back(v);
  }
  return out;
}

std::vector<VertexId> RestrictedSubtree::subtree(VertexId v) const {
  if (!contains(v)) throw InputError("RestrictedSubtree: vertex not in subtree");
  std::vector<VertexId> out;
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    const VertexId x = stack.back();
    stack.pop_back();
    out.push_back(x);
    for (auto it = children_[x].rbegin(); it != children_[x].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return out;
}

double RestrictedSubtree::path_length(VertexId u, VertexId v) const {
  if (!contains(u) || !contains(v)) {
    throw InputError("RestrictedSubtree::path_length: vertex not in subtree");
  }
  auto ancestors = [&](VertexId x) {
    std::vector<VertexId> chain;
    for (; x != no_vertex; x = parent_[x]) chain.push_back(x);
    return chain;
  };
  const auto au = ancestors(u);
  const auto av = ancestors(v);
  VertexId meet = no_vertex;
  for (VertexId x : au) {
    if (std::find(av.begin(), av.end(), x) != av.end()) {
      meet = x;
      break;
    }
  }
  double total = 0.0;
  for (VertexId x = u; x != meet; x = parent_[x]) total += length_[x];
  for (VertexId x = v; x != meet; x = parent_[x]) total += length_[x];
  return total;
}

bool RestrictedSubtree::is_legal() const {
  if (vertices_.size() == 1) return true;
  if (children_[root_].size() != 2) return false;
  return std::all_of(vertices_.begin(), vertices_.end(), [&](VertexId v) {
    const auto c = children_[v].size();
    return c == 0 || c == 2;
  });
}

RestrictedSubtree restrict_to(const Phylogeny& tree,
                              const std::vector<VertexId>& keep,
                              std::optional<VertexId> root) {
  if (keep.empty()) throw InputError("restrict_to: empty keep set");
  const int nv = tree.vertex_count();
  for (VertexId v : keep) {
    if (v < 0 || v >= nv) {
      throw InputError("restrict_to: unknown vertex id " + std::to_string(v));
    }
  }

  RestrictedSubtree out;
  out.span_vertex_.assign(nv, false);
  out.span_edge_.assign(nv, false);
  out.member_.assign(nv, false);
  out.parent_.assign(nv, no_vertex);
  out.children_.assign(nv, {});
  out.length_.assign(nv, 0.0);

  VertexId top = keep.front();
  for (VertexId v : keep) top = tree.lca(top, v);
  for (VertexId v : keep) {
    out.span_vertex_[v] = true;
    for (VertexId x = v; x != top; x = tree.parent(x)) {
      out.span_edge_[x] = true;
      out.span_vertex_[tree.parent(x)] = true;
    }
  }

  const VertexId designated = root.value_or(top);
  if (designated < 0 || designated >= nv || !out.span_vertex_[designated]) {
    throw InputError("restrict_to: root must lie on the spanned paths");
  }

  auto span_neighbours = [&](VertexId v) {
    std::vector<VertexId> nb;
    if (v != tree.root() && out.span_edge_[v]) nb.push_back(tree.parent(v));
    for (VertexId c : tree.children(v)) {
      if (out.span_edge_[c]) nb.push_back(c);
    }
    return nb;
  };

  std::vector<bool> survives(nv, false);
  for (VertexId v : keep) survives[v] = true;
  survives[designated] = true;
  for (VertexId v = 0; v < nv; ++v) {
    if (out.span_vertex_[v] && span_neighbours(v).size() >= 3) survives[v] = true;
  }

  // Walk the span from the root, contracting runs of non-surviving vertices.
  // came_from[s] is the host neighbour of s on the way back to its parent.
  std::vector<VertexId> came_from(nv, no_vertex);
  out.root_ = designated;
  out.member_[designated] = true;
  out.vertices_.push_back(designated);
  std::deque<VertexId> queue{designated};
  while (!queue.empty()) {
    const VertexId s = queue.front();
    queue.pop_front();
    for (VertexId first : span_neighbours(s)) {
      if (first == came_from[s]) continue;
      VertexId prev = s;
      VertexId cur = first;
      double length = tree.path_length(prev, cur);
      while (!survives[cur]) {
        VertexId next = no_vertex;
        for (VertexId nb : span_neighbours(cur)) {
          if (nb != prev) next = nb;
        }
        length += tree.path_length(cur, next);
        prev = cur;
        cur = next;
      }
      out.member_[cur] = true;
      out.parent_[cur] = s;
      out.length_[cur] = length;
      came_from[cur] = prev;
      out.children_[s].push_back(cur);
      out.vertices_.push_back(cur);
      queue.push_back(cur);
    }
  }
  return out;
}

namespace {

VertexId nearest_in(const Phylogeny& tree, VertexId start,
                    const std::vector<bool>& target) {
  std::vector<bool> seen(tree.vertex_count(), false);
  std::deque<VertexId> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (target[v]) return v;
    for (VertexId nb : tree.neighbours(v)) {
      if (!seen[nb]) {
        seen[nb] = true;
        queue.push_back(nb);
      }
    }
  }
  return no_vertex;
}

}  // namespace

SubtreePairClassification classify_subtree_pair(const Phylogeny& tree,
                                                 const RestrictedSubtree& t1,
                                                 const RestrictedSubtree& t2) {
  const auto nv = static_cast<std::size_t>(tree.vertex_count());
  if (t1.span_vertices().size() != nv || t2.span_vertices().size() != nv) {
    throw InputError("classify_subtree_pair: subtree belongs to another tree");
  }
  if (!t1.is_legal() || !t2.is_legal()) {
    throw InputError("classify_subtree_pair: subtrees must be legal (rooted full binary)");
  }
  SubtreePairClassification out;
  for (std::size_t e = 0; e < nv; ++e) {
    if (t1.span_edges()[e] && t2.span_edges()[e]) return out;
  }
  out.edge_disjoint = true;

  VertexId shared = no_vertex;
  for (std::size_t v = 0; v < nv; ++v) {
    if (t1.span_vertices()[v] && t2.span_vertices()[v]) shared = static_cast<VertexId>(v);
  }
  if (shared != no_vertex) {
    out.w1 = out.w2 = shared;
  } else {
    out.w1 = nearest_in(tree, t2.root(), t1.span_vertices());
    out.w2 = nearest_in(tree, *out.w1, t2.span_vertices());
  }
  out.dangling = t1.root() != t2.root() && *out.w1 == t1.root() &&
                 *out.w2 == t2.root();
  return out;
}

}  // namespace deepdist

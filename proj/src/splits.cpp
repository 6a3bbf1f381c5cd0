#include "deepdist/splits.hpp"

#include <algorithm>
#include <bit>
#include <iterator>

#include "deepdist/errors.hpp"

namespace deepdist {

Bipartition::Bipartition(int n, const std::vector<int>& side)
    : n_(n), bits_((static_cast<std::size_t>(n) + 63) / 64, 0) {
  for (int leaf : side) {
    if (leaf < 0 || leaf >= n) throw InputError("Bipartition: leaf out of range");
    bits_[leaf / 64] |= std::uint64_t{1} << (leaf % 64);
  }
  if (n > 0 && contains(0)) {
    for (auto& w : bits_) w = ~w;
    if (n % 64 != 0) bits_.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  }
}

int Bipartition::side_size() const {
  int s = 0;
  for (auto w : bits_) s += std::popcount(w);
  return s;
}

bool Bipartition::contains(int leaf) const {
  return (bits_[leaf / 64] >> (leaf % 64)) & 1U;
}

bool Bipartition::nontrivial() const {
  const int s = side_size();
  return s >= 2 && n_ - s >= 2;
}

namespace {

// Bipartition for the edge into every non-root vertex.
std::vector<std::pair<VertexId, Bipartition>> edge_splits(const Phylogeny& tree) {
  std::vector<std::pair<VertexId, Bipartition>> out;
  const int n = tree.leaf_count();
  for (VertexId v : tree.preorder()) {
    if (v == tree.root()) continue;
    out.emplace_back(v, Bipartition(n, tree.leaves_below(v)));
  }
  return out;
}

}  // namespace

std::vector<Bipartition> nontrivial_splits(const Phylogeny& tree) {
  std::vector<Bipartition> out;
  for (auto& [v, split] : edge_splits(tree)) {
    if (split.nontrivial()) out.push_back(std::move(split));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<Bipartition, double> unrooted_edge_lengths(const Phylogeny& tree) {
  std::map<Bipartition, double> out;
  for (auto& [v, split] : edge_splits(tree)) {
    out[split] += tree.branch_length(v);
  }
  return out;
}

bool unrooted_equal(const Phylogeny& t1, const Phylogeny& t2) {
  return robinson_foulds(t1, t2) == 0;
}

int robinson_foulds(const Phylogeny& t1, const Phylogeny& t2) {
  if (t1.leaf_count() != t2.leaf_count()) {
    throw InputError("unrooted comparison: leaf sets differ");
  }
  const auto s1 = nontrivial_splits(t1);
  const auto s2 = nontrivial_splits(t2);
  std::vector<Bipartition> diff;
  std::set_symmetric_difference(s1.begin(), s1.end(), s2.begin(), s2.end(),
                                std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

}  // namespace deepdist

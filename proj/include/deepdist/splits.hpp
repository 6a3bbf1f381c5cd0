#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "deepdist/phylogeny.hpp"

namespace deepdist {

// Leaf bipartition stored as the bitset of the side that does not contain
// leaf 0.
class Bipartition {
 public:
  Bipartition(int n, const std::vector<int>& side);

  int leaf_count() const { return n_; }
  int side_size() const;
  bool contains(int leaf) const;
  // Nontrivial iff both sides hold at least two leaves.
  bool nontrivial() const;

  auto operator<=>(const Bipartition&) const = default;
  bool operator==(const Bipartition&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Nontrivial bipartitions induced by the edges of the unrooted tree (the two
// root edges induce the same split and are reported once). Sorted.
std::vector<Bipartition> nontrivial_splits(const Phylogeny& tree);

// Unrooted edge lengths keyed by bipartition, trivial (pendant) splits
// included. The two root edges merge into one edge carrying their sum.
std::map<Bipartition, double> unrooted_edge_lengths(const Phylogeny& tree);

// Topological equality of the unrooted trees (weights ignored). Throws
// InputError on differing leaf counts.
bool unrooted_equal(const Phylogeny& t1, const Phylogeny& t2);

// Robinson-Foulds distance: size of the symmetric difference of the
// nontrivial split sets.
int robinson_foulds(const Phylogeny& t1, const Phylogeny& t2);

}  // namespace deepdist

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "deepdist/gtr.hpp"
#include "deepdist/phylogeny.hpp"

namespace deepdist {

using State = std::uint8_t;

// One full assignment of states to the vertices of a tree (indexed by vertex
// id).
struct SiteSample {
  std::vector<State> states;
};

// k sites observed at the n leaves. Leaf rows are indexed by leaf label.
// Internal (all-vertex) states are present only when requested at sampling
// time.
class Alignment {
 public:
  Alignment(int n, int k, int phi);

  int leaf_count() const { return n_; }
  int site_count() const { return k_; }
  int phi() const { return phi_; }

  std::span<const State> leaf(int label) const;
  State at(int label, int site) const { return leaf(label)[site]; }
  void set(int label, int site, State s);

  bool has_internal_states() const { return !vertex_states_.empty(); }
  // States of host vertex v over all sites; throws InputError if internal
  // states were not kept.
  std::span<const State> vertex(VertexId v) const;

  bool operator==(const Alignment&) const = default;

 private:
  friend Alignment sample_alignment(const Phylogeny&, const RateMatrix&, int,
                                    std::uint64_t, bool);

  int n_ = 0;
  int k_ = 0;
  int phi_ = 0;
  std::vector<State> leaf_states_;    // n x k, leaf-major
  std::vector<State> vertex_states_;  // |V| x k, vertex-major, optional
};

// Draws site `site` of the stream `seed`: root from pi, then each child from
// the transition row of its parent's state. Zero-length edges copy the state.
SiteSample sample_site(const Phylogeny& tree, const RateMatrix& model,
                       std::uint64_t seed, std::uint64_t site = 0);

// Sites 0..k-1 of the stream `seed`; column i equals
// sample_site(tree, model, seed, i). Throws InputError for k < 1.
Alignment sample_alignment(const Phylogeny& tree, const RateMatrix& model, int k,
                           std::uint64_t seed, bool keep_internal = false);

// Text format:
//   #deepdist-alignment v1
//   <n> <k> <phi>
//   k lines, one per site, each with n space-separated state indices.
void write_alignment(std::ostream& out, const Alignment& alignment);
Alignment read_alignment(std::istream& in);
void save_alignment(const std::string& path, const Alignment& alignment);
Alignment load_alignment(const std::string& path);

// One record per leaf (">leaf<label>"), states as 0-9A-Z. Throws
// UnsupportedError for phi > 36.
void write_fasta(std::ostream& out, const Alignment& alignment);

}  // namespace deepdist

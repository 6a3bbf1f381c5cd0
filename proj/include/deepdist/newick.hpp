#pragma once

#include <string>
#include <string_view>

#include "deepdist/phylogeny.hpp"

namespace deepdist {

// Canonical Newick: leaves are written as their integer labels, children are
// ordered by their smallest descendant label, branch lengths use the shortest
// representation that round-trips. The output is byte-stable for a given
// rooted tree regardless of internal vertex numbering.
std::string to_newick(const Phylogeny& tree);

// Reads a rooted binary Newick tree whose leaf names are integers 0..n-1.
// Internal node names are ignored; a branch length on the root is ignored.
// Throws FormatError on malformed input.
Phylogeny parse_newick(std::string_view text,
                       ZeroLengthEdges zero_edges = ZeroLengthEdges::allow);

// Shortest round-trip decimal representation of a double ("inf" for +inf).
std::string format_real(double value);
// Inverse of format_real; throws FormatError.
double parse_real(std::string_view token);

}  // namespace deepdist

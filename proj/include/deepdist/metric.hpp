#pragma once

#include <array>
#include <limits>
#include <vector>

namespace deepdist {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Symmetric leaf-pair table of extended reals (+inf allowed), indexed by leaf
// label. Serves both as a tree metric and as a matrix of estimated distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n, double fill = 0.0);

  int size() const { return n_; }
  double operator()(int a, int b) const { return d_[index(a, b)]; }
  // Sets both (a,b) and (b,a).
  void set(int a, int b, double value);

  // Relabel: result(p[a], p[b]) = (*this)(a, b).
  DistanceMatrix permuted(const std::vector<int>& p) const;

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t index(int a, int b) const;

  int n_ = 0;
  std::vector<double> d_;
};

using TreeMetric = DistanceMatrix;

// One of ab|cd, ac|bd, ad|bc. Normalised so that each side is sorted and the
// left side holds the smallest label.
struct QuartetSplit {
  std::array<int, 2> left{};
  std::array<int, 2> right{};

  static QuartetSplit make(int a, int b, int c, int d);
  // True when x and y are on the same side.
  bool groups(int x, int y) const;
  // True when x and y are on opposite sides.
  bool separates(int x, int y) const;

  bool operator==(const QuartetSplit&) const = default;
  auto operator<=>(const QuartetSplit&) const = default;
};

struct FourPointResult {
  QuartetSplit split;
  // F(ab|cd) = (d(a,c) + d(b,d) - d(a,b) - d(c,d)) / 2. Positive values pick
  // ab|cd, negative values ac|bd, zero falls through to ad|bc. For an additive
  // metric whose true split is ab|cd this is the internal edge length.
  // |F| within 1e-12 of the largest distance (or of 1) counts as zero.
  double margin = 0.0;
};

// Classical four-point test. Throws NoDecisionError if any of the six
// distances is infinite and InputError if the leaves are not distinct.
FourPointResult four_point_split(const DistanceMatrix& metric, int a, int b,
                                 int c, int d);

// True when, for every quartet, the two largest of the three pair sums agree
// within `tolerance`.
bool satisfies_four_point_condition(const DistanceMatrix& metric,
                                    double tolerance = 1e-12);

}  // namespace deepdist

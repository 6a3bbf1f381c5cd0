#include "deepdist/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deepdist/errors.hpp"

namespace deepdist {

DistanceMatrix::DistanceMatrix(int n, double fill) : n_(n) {
  if (n < 0) throw InputError("DistanceMatrix: negative size");
  d_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill);
}

std::size_t DistanceMatrix::index(int a, int b) const {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) {
    throw InputError("DistanceMatrix: leaf index out of range (" +
                     std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
         static_cast<std::size_t>(b);
}

void DistanceMatrix::set(int a, int b, double value) {
  d_[index(a, b)] = value;
  d_[index(b, a)] = value;
}

DistanceMatrix DistanceMatrix::permuted(const std::vector<int>& p) const {
  if (static_cast<int>(p.size()) != n_) {
    throw InputError("DistanceMatrix::permuted: permutation size mismatch");
  }
  DistanceMatrix out(n_);
  for (int a = 0; a < n_; ++a) {
    for (int b = a; b < n_; ++b) out.set(p[a], p[b], (*this)(a, b));
  }
  return out;
}

QuartetSplit QuartetSplit::make(int a, int b, int c, int d) {
  std::array<int, 2> x{std::min(a, b), std::max(a, b)};
  std::array<int, 2> y{std::min(c, d), std::max(c, d)};
  if (y[0] < x[0]) std::swap(x, y);
  return QuartetSplit{x, y};
}

bool QuartetSplit::groups(int x, int y) const {
  auto in = [](const std::array<int, 2>& s, int v) { return s[0] == v || s[1] == v; };
  return (in(left, x) && in(left, y)) || (in(right, x) && in(right, y));
}

bool QuartetSplit::separates(int x, int y) const {
  auto in = [](const std::array<int, 2>& s, int v) { return s[0] == v || s[1] == v; };
  return (in(left, x) && in(right, y)) || (in(right, x) && in(left, y));
}

FourPointResult four_point_split(const DistanceMatrix& metric, int a, int b,
                                 int c, int d) {
  std::array<int, 4> q{a, b, c, d};
  std::sort(q.begin(), q.end());
  if (std::adjacent_find(q.begin(), q.end()) != q.end()) {
    throw InputError("four_point_split: leaves must be distinct");
  }
  const double ab = metric(a, b), cd = metric(c, d);
  const double ac = metric(a, c), bd = metric(b, d);
  const double ad = metric(a, d), bc = metric(b, c);
  for (double v : {ab, cd, ac, bd, ad, bc}) {
    if (!std::isfinite(v)) {
      throw NoDecisionError("four_point_split: infinite distance in quartet");
    }
  }
  double f = 0.5 * (ac + bd - ab - cd);
  // Cancellation noise on a true tie must not pick a side.
  const double scale = std::max({1.0, ab, cd, ac, bd, ad, bc});
  if (std::abs(f) <= 1e-12 * scale) f = 0.0;
  if (f > 0) return {QuartetSplit::make(a, b, c, d), f};
  if (f < 0) return {QuartetSplit::make(a, c, b, d), f};
  return {QuartetSplit::make(a, d, b, c), f};
}

bool satisfies_four_point_condition(const DistanceMatrix& metric,
                                    double tolerance) {
  const int n = metric.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          std::array<double, 3> s{metric(a, b) + metric(c, d),
                                  metric(a, c) + metric(b, d),
                                  metric(a, d) + metric(b, c)};
          std::sort(s.begin(), s.end());
          if (std::abs(s[2] - s[1]) > tolerance) return false;
        }
  return true;
}

}  // namespace deepdist

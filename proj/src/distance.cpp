#include "deepdist/distance.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "deepdist/errors.hpp"
#include "deepdist/newick.hpp"

namespace deepdist {

namespace {

double neg_log_or_inf(double x) { return x > 0.0 ? -std::log(x) : infinity; }

}  // namespace

CorrelationMatrix::CorrelationMatrix(int phi, long long k, std::vector<long long> counts)
    : phi_(phi), k_(k), counts_(std::move(counts)) {
  if (phi < 2 || k < 1 || counts_.size() != static_cast<std::size_t>(phi) * phi) {
    throw InputError("correlation matrix: inconsistent dimensions");
  }
  long long total = 0;
  for (long long c : counts_) {
    if (c < 0) throw InputError("correlation matrix: negative count");
    total += c;
  }
  if (total != k) throw InputError("correlation matrix: counts must sum to k");
}

std::size_t CorrelationMatrix::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= phi_ || j >= phi_) throw InputError("correlation matrix: bad state");
  return static_cast<std::size_t>(i) * phi_ + j;
}

Eigen::MatrixXd CorrelationMatrix::frequencies() const {
  Eigen::MatrixXd f(phi_, phi_);
  for (int i = 0; i < phi_; ++i) {
    for (int j = 0; j < phi_; ++j) f(i, j) = (*this)(i, j);
  }
  return f;
}

CorrelationMatrix correlation_matrix(std::span<const State> a, std::span<const State> b,
                                     int phi) {
  if (a.size() != b.size()) throw InputError("correlation_matrix: length mismatch");
  if (a.empty()) throw InputError("correlation_matrix: empty sequences");
  std::vector<long long> counts(static_cast<std::size_t>(phi) * phi, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= phi || b[i] >= phi) throw InputError("correlation_matrix: state out of range");
    ++counts[static_cast<std::size_t>(a[i]) * phi + b[i]];
  }
  return CorrelationMatrix(phi, static_cast<long long>(a.size()), std::move(counts));
}

double tau_hat(const CorrelationMatrix& f, const Eigen::VectorXd& nu) {
  if (nu.size() != f.phi()) throw InputError("tau_hat: nu has the wrong length");
  double q = 0.0;
  for (int i = 0; i < f.phi(); ++i) {
    for (int j = 0; j < f.phi(); ++j) {
      q += nu(i) * nu(j) * static_cast<double>(f.count(i, j));
    }
  }
  return neg_log_or_inf(q / static_cast<double>(f.sites()));
}

double tau_hat(const Eigen::MatrixXd& f, const Eigen::VectorXd& nu) {
  if (f.rows() != nu.size() || f.cols() != nu.size()) {
    throw InputError("tau_hat: dimension mismatch");
  }
  return neg_log_or_inf(nu.dot(f * nu));
}

double tau_hat_from_sites(std::span<const State> a, std::span<const State> b,
                          const Eigen::VectorXd& nu) {
  if (a.size() != b.size() || a.empty()) throw InputError("tau_hat_from_sites: bad lengths");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += nu(a[i]) * nu(b[i]);
  return neg_log_or_inf(sum / static_cast<double>(a.size()));
}

double cfn_distance(const CorrelationMatrix& f) {
  if (f.phi() != 2) throw UnsupportedError("cfn distance requires two states");
  const long long k = f.sites();
  const long long disagree = f.count(0, 1) + f.count(1, 0);
  return neg_log_or_inf(static_cast<double>(k - 2 * disagree) / static_cast<double>(k));
}

double logdet_distance(const CorrelationMatrix& f) {
  return neg_log_or_inf(std::abs(f.frequencies().determinant()));
}

double scaled_logdet_distance(const CorrelationMatrix& f, const RateMatrix& model) {
  if (f.phi() != model.phi()) throw InputError("scaled logdet: state count mismatch");
  const double raw = logdet_distance(f);
  if (std::isinf(raw)) return infinity;
  const double log_pi = model.pi().array().log().sum();
  return (raw + log_pi) / -model.eigenvalues().sum();
}

BaselineDistances baseline_metrics(const CorrelationMatrix& f) {
  return {cfn_distance(f), logdet_distance(f)};
}

DistanceMatrix all_pairs_distances(const Alignment& alignment, const Eigen::VectorXd& nu) {
  const int n = alignment.leaf_count();
  DistanceMatrix out(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      out.set(a, b, tau_hat(correlation_matrix(alignment.leaf(a), alignment.leaf(b),
                                               alignment.phi()),
                            nu));
    }
  }
  return out;
}

Estimator parse_estimator(const std::string& name) {
  if (name == "eigenvector") return Estimator::eigenvector;
  if (name == "cfn") return Estimator::cfn;
  if (name == "logdet") return Estimator::logdet;
  throw ConfigError("unknown estimator '" + name + "'");
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::eigenvector: return "eigenvector";
    case Estimator::cfn: return "cfn";
    case Estimator::logdet: return "logdet";
  }
  return "?";
}

DistanceMatrix all_pairs_distances(const Alignment& alignment, const RateMatrix& model,
                                   Estimator estimator) {
  if (alignment.phi() != model.phi()) throw InputError("distances: state count mismatch");
  if (estimator == Estimator::eigenvector) return all_pairs_distances(alignment, model.nu());
  const int n = alignment.leaf_count();
  DistanceMatrix out(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const auto f = correlation_matrix(alignment.leaf(a), alignment.leaf(b), alignment.phi());
      out.set(a, b, estimator == Estimator::cfn ? cfn_distance(f)
                                                : scaled_logdet_distance(f, model));
    }
  }
  return out;
}

Eigen::MatrixXd exact_correlation(const RateMatrix& model, double t) {
  return model.pi().asDiagonal() * model.transition_matrix(t);
}

void write_distance_csv(std::ostream& out, const DistanceMatrix& d) {
  out << "#deepdist-distances v1\nlabel";
  for (int a = 0; a < d.size(); ++a) out << ',' << a;
  out << '\n';
  for (int a = 0; a < d.size(); ++a) {
    out << a;
    for (int b = 0; b < d.size(); ++b) out << ',' << format_real(d(a, b));
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

DistanceMatrix read_distance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#deepdist-distances v1", 0) != 0) {
    throw FormatError("distances: missing '#deepdist-distances v1' header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(split_csv(line));
  }
  if (rows.empty()) throw FormatError("distances: missing label row");
  const int n = static_cast<int>(rows[0].size()) - 1;
  if (n < 1 || static_cast<int>(rows.size()) != n + 1) {
    throw FormatError("distances: expected a label row and n data rows");
  }
  for (int a = 0; a < n; ++a) {
    if (rows[0][a + 1] != std::to_string(a) || rows[a + 1].size() != rows[0].size() ||
        rows[a + 1][0] != std::to_string(a)) {
      throw FormatError("distances: labels must be 0..n-1 in order");
    }
  }
  DistanceMatrix d(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double x = parse_real(rows[a + 1][b + 1]);
      const double y = parse_real(rows[b + 1][a + 1]);
      if (!(x == y) || x < 0.0) {
        throw FormatError("distances: matrix must be symmetric and nonnegative");
      }
      d.set(a, b, x);
    }
  }
  return d;
}

void save_distance_csv(const std::string& path, const DistanceMatrix& d) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_distance_csv(out, d);
}

DistanceMatrix load_distance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_distance_csv(in);
}

}  // namespace deepdist

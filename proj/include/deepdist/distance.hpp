#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deepdist/gtr.hpp"
#include "deepdist/metric.hpp"
#include "deepdist/seq_sim.hpp"

namespace deepdist {

// Joint state counts of two leaves over k sites; frequencies are count / k.
class CorrelationMatrix {
 public:
  CorrelationMatrix(int phi, long long k, std::vector<long long> counts);

  int phi() const { return phi_; }
  long long sites() const { return k_; }
  long long count(int i, int j) const { return counts_.at(index(i, j)); }
  double operator()(int i, int j) const {
    return static_cast<double>(count(i, j)) / static_cast<double>(k_);
  }
  Eigen::MatrixXd frequencies() const;

 private:
  std::size_t index(int i, int j) const;

  int phi_;
  long long k_;
  std::vector<long long> counts_;
};

// Throws InputError on a length mismatch or empty sequences.
CorrelationMatrix correlation_matrix(std::span<const State> a, std::span<const State> b,
                                     int phi);

// -ln(nu' F nu), +inf when the quadratic form is not positive. The count
// version evaluates (nu' C nu) / k on the integer counts C.
double tau_hat(const CorrelationMatrix& f, const Eigen::VectorXd& nu);
double tau_hat(const Eigen::MatrixXd& f, const Eigen::VectorXd& nu);
// Same estimate through the per-site products sigma_a * sigma_b with
// sigma = nu[state].
double tau_hat_from_sites(std::span<const State> a, std::span<const State> b,
                          const Eigen::VectorXd& nu);

// -ln(1 - 2(F+- + F-+)); throws UnsupportedError unless phi = 2.
double cfn_distance(const CorrelationMatrix& f);
// -ln|det F|, +inf at det = 0.
double logdet_distance(const CorrelationMatrix& f);
// Log-det rescaled to the model's time units:
// (logdet + sum_i ln pi_i) / (-sum_i Lambda_i). Exact on infinite-k tables.
double scaled_logdet_distance(const CorrelationMatrix& f, const RateMatrix& model);

struct BaselineDistances {
  double cfn;
  double logdet;
};
// Both baselines; throws UnsupportedError unless phi = 2.
BaselineDistances baseline_metrics(const CorrelationMatrix& f);

// tau_hat over all leaf pairs (diagonal included).
DistanceMatrix all_pairs_distances(const Alignment& alignment, const Eigen::VectorXd& nu);

enum class Estimator { eigenvector, cfn, logdet };
Estimator parse_estimator(const std::string& name);
std::string estimator_name(Estimator e);
DistanceMatrix all_pairs_distances(const Alignment& alignment, const RateMatrix& model,
                                   Estimator estimator);

// Infinite-k table diag(pi) e^{tQ}.
Eigen::MatrixXd exact_correlation(const RateMatrix& model, double t);

// CSV:
//   #deepdist-distances v1
//   label,0,1,...,n-1
//   0,d00,d01,...
// "inf" stands for +inf. The matrix must be symmetric.
void write_distance_csv(std::ostream& out, const DistanceMatrix& d);
DistanceMatrix read_distance_csv(std::istream& in);
void save_distance_csv(const std::string& path, const DistanceMatrix& d);
DistanceMatrix load_distance_csv(const std::string& path);

}  // namespace deepdist

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace deepdist {

// Reversible rate matrix normalised so that the second eigenvalue is -1.
//
// The spectrum comes from the symmetrisation S = D^{1/2} Q D^{-1/2}
// (D = diag(pi)), which is exactly symmetric for a reversible chain. The right
// eigenvector nu for eigenvalue -1 satisfies sum_i pi_i nu_i = 0 and
// sum_i pi_i nu_i^2 = 1; its first nonzero coordinate is positive.
class RateMatrix {
 public:
  int phi() const { return static_cast<int>(pi_.size()); }
  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::VectorXd& pi() const { return pi_; }
  // Descending: 0 = Lambda_1 > Lambda_2 = -1 >= ... >= Lambda_phi.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::VectorXd& nu() const { return nu_; }
  // Scale applied to the raw input so that Lambda_2 = -1.
  double scale() const { return scale_; }

  // max_i |nu_i|.
  double nu_max() const { return nu_.cwiseAbs().maxCoeff(); }
  double pi_min() const { return pi_.minCoeff(); }

  // e^{tQ}, computed from the eigendecomposition. Throws InputError for
  // negative or non-finite t.
  Eigen::MatrixXd transition_matrix(double t) const;

 private:
  friend RateMatrix build_gtr(const Eigen::MatrixXd&, const Eigen::VectorXd&);

  Eigen::MatrixXd q_;
  Eigen::VectorXd pi_;
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd nu_;
  // Orthonormal eigenvectors of the symmetrised matrix, columns in the same
  // order as eigenvalues_.
  Eigen::MatrixXd sym_vectors_;
  Eigen::VectorXd sqrt_pi_;
  double scale_ = 1.0;
};

// Validation tolerance for user-supplied rows, pi and reversibility.
inline constexpr double kValidationTolerance = 1e-9;

// Validates and normalises a reversible rate matrix. Throws ValidationError on
// non-positive off-diagonals, nonzero row sums, invalid pi, non-reversibility
// or a reducible chain (Lambda_2 = 0).
RateMatrix build_gtr(const Eigen::MatrixXd& raw_q, const Eigen::VectorXd& pi);

inline Eigen::MatrixXd transition_matrix(const RateMatrix& model, double t) {
  return model.transition_matrix(t);
}

// Named models.
RateMatrix cfn_model();
// Two-state channel Q = [[-pi_minus, pi_minus], [pi_plus, -pi_plus]].
RateMatrix binary_asymmetric_model(double pi_plus, double pi_minus);
// phi-state model with uniform off-diagonal rates and uniform pi.
RateMatrix jukes_cantor_like_model(int phi);

// Selects a named model: "cfn", "binary_asymmetric" (params: pi_plus,
// pi_minus), "jukes_cantor" (params: phi). Throws ValidationError.
RateMatrix preset_model(const std::string& name, const std::vector<double>& params);

// Key-value model description:
//   preset = cfn | binary_asymmetric | jukes_cantor   (optional)
//   params = ...                                      (preset parameters)
//   phi = 4
//   pi = 0.1 0.2 0.3 0.4
//   q0 = ...  q1 = ...                                (raw rows)
RateMatrix read_model_file(const std::string& path);
RateMatrix parse_model_text(const std::string& text);

}  // namespace deepdist

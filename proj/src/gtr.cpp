#include "deepdist/gtr.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "deepdist/errors.hpp"
#include "deepdist/keyvalue.hpp"

namespace deepdist {

namespace {

// Vector of the eigenspace (columns of `basis`, nu-coordinates) whose support
// ends earliest: eliminate columns from the last coordinate backwards and keep
// the row pivoted last.
Eigen::VectorXd earliest_support_vector(Eigen::MatrixXd basis) {
  Eigen::MatrixXd rows = basis.transpose();  // m x phi
  const int m = static_cast<int>(rows.rows());
  const int phi = static_cast<int>(rows.cols());
  std::vector<bool> used(m, false);
  int last = 0;
  int pivots = 0;
  for (int col = phi - 1; col >= 0 && pivots < m; --col) {
    int best = -1;
    double best_abs = 1e-10;
    for (int r = 0; r < m; ++r) {
      if (!used[r] && std::abs(rows(r, col)) > best_abs) {
        best = r;
        best_abs = std::abs(rows(r, col));
      }
    }
    if (best < 0) {
      for (int r = 0; r < m; ++r) {
        if (!used[r]) rows(r, col) = 0.0;
      }
      continue;
    }
    used[best] = true;
    last = best;
    ++pivots;
    for (int r = 0; r < m; ++r) {
      if (r == best) continue;
      rows.row(r) -= (rows(r, col) / rows(best, col)) * rows.row(best);
      rows(r, col) = 0.0;
    }
  }
  return rows.row(last).transpose();
}

}  // namespace

RateMatrix build_gtr(const Eigen::MatrixXd& raw_q, const Eigen::VectorXd& pi_in) {
  const auto phi = raw_q.rows();
  if (phi < 2 || raw_q.cols() != phi) {
    throw ValidationError("build_gtr: rate matrix must be square with at least 2 states");
  }
  if (pi_in.size() != phi) throw ValidationError("build_gtr: pi has the wrong length");
  if (!raw_q.allFinite() || !pi_in.allFinite()) {
    throw ValidationError("build_gtr: non-finite entries");
  }
  if ((pi_in.array() <= 0.0).any()) {
    throw ValidationError("build_gtr: pi entries must be strictly positive");
  }
  if (std::abs(pi_in.sum() - 1.0) > kValidationTolerance) {
    throw ValidationError("build_gtr: pi must sum to 1");
  }
  const double magnitude = raw_q.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < phi; ++i) {
    for (Eigen::Index j = 0; j < phi; ++j) {
      if (i != j && !(raw_q(i, j) > 0.0)) {
        throw ValidationError("build_gtr: off-diagonal rates must be positive");
      }
    }
    if (std::abs(raw_q.row(i).sum()) > kValidationTolerance * magnitude) {
      throw ValidationError("build_gtr: rows must sum to zero");
    }
  }
  const Eigen::VectorXd pi = pi_in / pi_in.sum();
  for (Eigen::Index i = 0; i < phi; ++i) {
    for (Eigen::Index j = i + 1; j < phi; ++j) {
      const double residual = std::abs(pi(i) * raw_q(i, j) - pi(j) * raw_q(j, i));
      if (residual >= kValidationTolerance * magnitude) {
        throw ValidationError("build_gtr: rate matrix is not reversible with respect to pi");
      }
    }
  }

  // Symmetrise, then rebuild Q from the symmetric matrix so that detailed
  // balance and zero row sums hold to rounding.
  const Eigen::VectorXd sqrt_pi = pi.cwiseSqrt();
  Eigen::MatrixXd sym(phi, phi);
  for (Eigen::Index i = 0; i < phi; ++i) {
    for (Eigen::Index j = 0; j < phi; ++j) {
      sym(i, j) = raw_q(i, j) * sqrt_pi(i) / sqrt_pi(j);
    }
  }
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::MatrixXd q(phi, phi);
  for (Eigen::Index i = 0; i < phi; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < phi; ++j) {
      if (i == j) continue;
      q(i, j) = sym(i, j) * sqrt_pi(j) / sqrt_pi(i);
      off += q(i, j);
    }
    q(i, i) = -off;
    sym(i, i) = -off;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("build_gtr: eigendecomposition failed");
  }
  // Ascending -> descending.
  const Eigen::VectorXd ascending = solver.eigenvalues();
  const Eigen::MatrixXd vectors = solver.eigenvectors();
  Eigen::VectorXd values(phi);
  Eigen::MatrixXd sym_vectors(phi, phi);
  for (Eigen::Index k = 0; k < phi; ++k) {
    values(k) = ascending(phi - 1 - k);
    sym_vectors.col(k) = vectors.col(phi - 1 - k);
  }
  const double lambda2 = values(1);
  if (!(lambda2 < -kValidationTolerance * magnitude)) {
    throw ValidationError("build_gtr: reducible chain (second eigenvalue is zero)");
  }
  const double scale = -1.0 / lambda2;

  RateMatrix out;
  out.q_ = scale * q;
  out.pi_ = pi;
  out.sqrt_pi_ = sqrt_pi;
  out.scale_ = scale;
  out.eigenvalues_ = scale * values;
  out.eigenvalues_(0) = 0.0;
  out.eigenvalues_(1) = -1.0;
  sym_vectors.col(0) = sqrt_pi;

  // Second eigenspace (possibly degenerate), in nu-coordinates.
  Eigen::Index multiplicity = 1;
  while (1 + multiplicity < phi &&
         std::abs(out.eigenvalues_(1 + multiplicity) + 1.0) <= kValidationTolerance) {
    out.eigenvalues_(1 + multiplicity) = -1.0;
    ++multiplicity;
  }
  Eigen::MatrixXd basis(phi, multiplicity);
  for (Eigen::Index c = 0; c < multiplicity; ++c) {
    basis.col(c) = sym_vectors.col(1 + c).cwiseQuotient(sqrt_pi);
  }
  Eigen::VectorXd nu = multiplicity == 1 ? Eigen::VectorXd(basis.col(0))
                                         : earliest_support_vector(basis);
  nu /= std::sqrt(nu.cwiseProduct(nu).dot(pi));
  if (phi == 2) {
    // Closed form; exact for CFN.
    nu << std::sqrt(pi(1) / pi(0)), -std::sqrt(pi(0) / pi(1));
  }
  for (Eigen::Index i = 0; i < phi; ++i) {
    if (std::abs(nu(i)) > 1e-12) {
      if (nu(i) < 0) nu = -nu;
      break;
    }
  }
  out.nu_ = nu;
  out.sym_vectors_ = sym_vectors;
  return out;
}

Eigen::MatrixXd RateMatrix::transition_matrix(double t) const {
  if (!std::isfinite(t) || t < 0.0) {
    throw InputError("transition_matrix: time must be finite and nonnegative");
  }
  const auto phi = pi_.size();
  if (t == 0.0) return Eigen::MatrixXd::Identity(phi, phi);
  const Eigen::VectorXd decay = (t * eigenvalues_).array().exp();
  const Eigen::MatrixXd core = sym_vectors_ * decay.asDiagonal() * sym_vectors_.transpose();
  Eigen::MatrixXd m(phi, phi);
  for (Eigen::Index i = 0; i < phi; ++i) {
    for (Eigen::Index j = 0; j < phi; ++j) {
      m(i, j) = std::max(0.0, core(i, j) * sqrt_pi_(j) / sqrt_pi_(i));
    }
  }
  return m;
}

RateMatrix cfn_model() {
  Eigen::MatrixXd q(2, 2);
  q << -0.5, 0.5, 0.5, -0.5;
  return build_gtr(q, Eigen::Vector2d(0.5, 0.5));
}

RateMatrix binary_asymmetric_model(double pi_plus, double pi_minus) {
  if (!(pi_plus > 0.0) || !(pi_minus > 0.0)) {
    throw ValidationError("binary_asymmetric: pi entries must be strictly positive");
  }
  if (std::abs(pi_plus + pi_minus - 1.0) > kValidationTolerance) {
    throw ValidationError("binary_asymmetric: pi must sum to 1");
  }
  Eigen::MatrixXd q(2, 2);
  q << -pi_minus, pi_minus, pi_plus, -pi_plus;
  return build_gtr(q, Eigen::Vector2d(pi_plus, pi_minus));
}

RateMatrix jukes_cantor_like_model(int phi) {
  if (phi < 2) throw ValidationError("jukes_cantor: need at least 2 states");
  Eigen::MatrixXd q = Eigen::MatrixXd::Ones(phi, phi);
  q.diagonal().setConstant(-(phi - 1.0));
  return build_gtr(q, Eigen::VectorXd::Constant(phi, 1.0 / phi));
}

RateMatrix preset_model(const std::string& name, const std::vector<double>& params) {
  if (name == "cfn") return cfn_model();
  if (name == "binary_asymmetric") {
    if (params.size() == 1) return binary_asymmetric_model(params[0], 1.0 - params[0]);
    if (params.size() != 2) {
      throw ValidationError("binary_asymmetric: expected pi_plus [pi_minus]");
    }
    return binary_asymmetric_model(params[0], params[1]);
  }
  if (name == "jukes_cantor") {
    if (params.size() != 1 || params[0] != std::floor(params[0])) {
      throw ValidationError("jukes_cantor: expected an integer state count");
    }
    return jukes_cantor_like_model(static_cast<int>(params[0]));
  }
  throw ValidationError("unknown model preset '" + name + "'");
}

RateMatrix parse_model_text(const std::string& text) {
  const auto kv = KeyValueFile::parse(text);
  if (auto preset = kv.get("preset")) return preset_model(*preset, kv.get_doubles("params"));
  const long long phi = kv.get_int("phi", 0);
  if (phi < 2) throw ValidationError("model: 'phi' (>= 2) or 'preset' required");
  const auto pi_values = kv.get_doubles("pi");
  if (static_cast<long long>(pi_values.size()) != phi) {
    throw ValidationError("model: 'pi' must list phi entries");
  }
  Eigen::MatrixXd q(phi, phi);
  Eigen::VectorXd pi(phi);
  for (long long i = 0; i < phi; ++i) {
    pi(i) = pi_values[i];
    const auto row = kv.get_doubles("q" + std::to_string(i));
    if (static_cast<long long>(row.size()) != phi) {
      throw ValidationError("model: row q" + std::to_string(i) + " must list phi entries");
    }
    for (long long j = 0; j < phi; ++j) q(i, j) = row[j];
  }
  return build_gtr(q, pi);
}

RateMatrix read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

}  // namespace deepdist

// SPDX-License-Identifier: Apache-2.0
#include "trendvar/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "trendvar/errors.hpp"

namespace trendvar {

Matrix cholesky_factor(const Matrix& m, const CholeskyOptions& options) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "cholesky: matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NotPositiveDefinite, "cholesky: non-finite entries");
  }
  const double magnitude = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > options.symmetry_tolerance * magnitude) {
    std::ostringstream msg;
    msg << "cholesky: matrix not symmetric (max |m - m'| = " << asymmetry << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  const Index n = sym.rows();

  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double trace = sym.trace();
  if (trace > 0.0) {
    double jitter = options.initial_jitter * trace / static_cast<double>(n);
    for (int attempt = 0; attempt < options.max_retries; ++attempt) {
      Matrix shifted = sym;
      shifted.diagonal().array() += jitter;
      llt.compute(shifted);
      if (llt.info() == Eigen::Success) return llt.matrixL();
      jitter *= options.escalation;
    }
  }
  throw Error(ErrorKind::NotPositiveDefinite,
              "cholesky: matrix is not positive-definite (pivot <= 0 after jitter)");
}

Matrix companion_matrix(const std::vector<Matrix>& a) {
  if (a.empty()) throw Error(ErrorKind::InvalidArgument, "companion: need at least one lag");
  const Index m = a.front().rows();
  const Index p = static_cast<Index>(a.size());
  Matrix c = Matrix::Zero(m * p, m * p);
  for (Index i = 0; i < p; ++i) {
    if (a[i].rows() != m || a[i].cols() != m) {
      throw Error(ErrorKind::InvalidArgument, "companion: coefficient matrices must be m x m");
    }
    c.block(0, i * m, m, m) = a[i];
  }
  if (p > 1) c.block(m, 0, m * (p - 1), m * (p - 1)).setIdentity();
  return c;
}

double companion_spectral_radius(const std::vector<Matrix>& a) {
  const Matrix c = companion_matrix(a);
  Eigen::EigenSolver<Matrix> solver(c, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "spectral radius: eigenvalue iteration failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ad::Var stationary_state_covariance(const std::vector<ad::Var>& a, const ad::Var& sigma) {
  if (a.empty()) throw Error(ErrorKind::InvalidArgument, "autocovariance: need p >= 1");
  ad::Tape& tape = sigma.tape();
  const Index m = sigma.rows();
  const Index p = static_cast<Index>(a.size());
  const Index n = m * p;

  std::vector<Matrix> a_values;
  a_values.reserve(a.size());
  for (const ad::Var& ai : a) a_values.push_back(ai.value());
  const double radius = companion_spectral_radius(a_values);
  if (!(radius < 1.0)) {
    std::ostringstream msg;
    msg << "stationary covariance: companion spectral radius " << radius << " >= 1";
    throw Error(ErrorKind::NearUnitRoot, msg.str());
  }
  // The LU estimate misses small systems (a 1x1 system always has condition
  // 1), so the distance to the unit circle is bounded as well.
  if (1.0 / (1.0 - radius) > kMaxStationaryCondition) {
    std::ostringstream msg;
    msg << "stationary covariance: companion spectral radius " << radius
        << " is within 1e-12 of the unit circle";
    throw Error(ErrorKind::NearUnitRoot, msg.str());
  }

  ad::Var a_star = ad::hcat(a);
  ad::Var sigma_star = sigma;
  if (p > 1) {
    Matrix lower = Matrix::Zero(n - m, n);
    lower.leftCols(n - m).setIdentity();
    a_star = ad::vcat({a_star, tape.constant(std::move(lower))});
    sigma_star = ad::vcat({ad::hcat({sigma, tape.constant(Matrix::Zero(m, n - m))}),
                           tape.constant(Matrix::Zero(n - m, n))});
  }
  ad::Var system = ad::sub(tape.constant(Matrix::Identity(n * n, n * n)), ad::kron(a_star, a_star));
  double condition = 0.0;
  ad::Var gamma_vec = ad::solve(system, ad::vec(sigma_star), &condition);
  if (!(condition <= kMaxStationaryCondition)) {
    std::ostringstream msg;
    msg << "stationary covariance: system condition " << condition
        << " exceeds 1e12; coefficients are too close to a unit root";
    throw Error(ErrorKind::NearUnitRoot, msg.str());
  }
  ad::Var gamma = ad::reshape(gamma_vec, n, n);
  // Symmetrize to remove solver round-off.
  return ad::scale(ad::add(gamma, ad::transpose(gamma)), 0.5);
}

std::vector<Matrix> stationary_autocovariances(const CausalVarParams& causal, Index maxlag) {
  if (maxlag < 0) throw Error(ErrorKind::InvalidArgument, "autocovariance: maxlag < 0");
  const Index m = causal.dim();
  const Index p = causal.order();
  ad::Tape tape;
  std::vector<ad::Var> a;
  a.reserve(causal.a.size());
  for (const Matrix& ai : causal.a) a.push_back(tape.constant(ai));
  const Matrix state = stationary_state_covariance(a, tape.constant(causal.sigma)).value();

  std::vector<Matrix> gamma;
  gamma.reserve(static_cast<std::size_t>(maxlag + 1));
  for (Index k = 0; k <= maxlag; ++k) {
    if (k < p) {
      gamma.push_back(state.block(0, k * m, m, m));
    } else {
      Matrix next = Matrix::Zero(m, m);
      for (Index i = 1; i <= p; ++i) next += causal.a[i - 1] * gamma[k - i];
      gamma.push_back(std::move(next));
    }
  }
  return gamma;
}

}  // namespace trendvar

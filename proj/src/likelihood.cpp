// SPDX-License-Identifier: Apache-2.0
#include "trendvar/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "trendvar/errors.hpp"
#include "trendvar/numerics.hpp"

namespace trendvar {

namespace {

void check_lengths(const Matrix& y, Index mu_rows, Index mu_cols, Index m, Index p) {
  if (y.rows() != m || mu_rows != m) {
    throw Error(ErrorKind::LengthMismatch, "likelihood: series dimension does not match the model");
  }
  if (y.cols() != mu_cols) {
    throw Error(ErrorKind::LengthMismatch, "likelihood: y has " + std::to_string(y.cols()) +
                                               " observations but the trend has " +
                                               std::to_string(mu_cols));
  }
  if (y.cols() < p) {
    throw Error(ErrorKind::LengthMismatch, "likelihood: need T >= p");
  }
}

// Reorders the stacked-state covariance (y_t, ..., y_{t-p+1}) into the
// covariance of (y_1, ..., y_p) by reversing the block order.
Matrix block_reversal(Index m, Index p) {
  Matrix j = Matrix::Zero(m * p, m * p);
  for (Index b = 0; b < p; ++b) j.block(b * m, (p - 1 - b) * m, m, m).setIdentity();
  return j;
}

ad::Var initial_block_cov(const CausalVars& causal) {
  ad::Tape& tape = causal.sigma.tape();
  const Index m = causal.sigma.rows();
  const Index p = static_cast<Index>(causal.a.size());
  ad::Var state = stationary_state_covariance(causal.a, causal.sigma);
  if (p == 1) return state;
  ad::Var j = tape.constant(block_reversal(m, p));
  return ad::matmul(ad::matmul(j, state), j);
}

ad::Var residual_panel(const ad::Var& deviations, const std::vector<ad::Var>& a) {
  const Index m = deviations.rows();
  const Index t_len = deviations.cols();
  const Index p = static_cast<Index>(a.size());
  ad::Var eps = ad::block(deviations, 0, p, m, t_len - p);
  for (Index i = 1; i <= p; ++i) {
    eps = ad::sub(eps, ad::matmul(a[i - 1], ad::block(deviations, 0, p - i, m, t_len - p)));
  }
  return eps;
}

}  // namespace

Matrix build_rp(const CausalVarParams& causal, Index p) {
  if (p != causal.order()) {
    throw Error(ErrorKind::InvalidArgument, "build_rp: p must equal the model order");
  }
  ad::Tape tape;
  CausalVars vars;
  for (const Matrix& ai : causal.a) vars.a.push_back(tape.constant(ai));
  vars.sigma = tape.constant(causal.sigma);
  return initial_block_cov(vars).value();
}

Matrix residuals(const Matrix& y, const Matrix& mu, const CausalVarParams& causal) {
  const Index m = causal.dim();
  const Index p = causal.order();
  check_lengths(y, mu.rows(), mu.cols(), m, p);
  const Matrix dev = y - mu;
  const Index n = y.cols() - p;
  Matrix eps = dev.rightCols(n);
  for (Index i = 1; i <= p; ++i) eps -= causal.a[i - 1] * dev.middleCols(p - i, n);
  return eps;
}

double log_likelihood(const Matrix& y, const Matrix& mu, const CausalVarParams& causal) {
  ad::Tape tape;
  CausalVars vars;
  for (const Matrix& ai : causal.a) vars.a.push_back(tape.constant(ai));
  vars.sigma = tape.constant(causal.sigma);
  return log_likelihood(y, tape.constant(mu), vars).scalar();
}

ad::Var log_likelihood(const Matrix& y, const ad::Var& mu, const CausalVars& causal) {
  ad::Tape& tape = mu.tape();
  const Index m = causal.sigma.rows();
  const Index p = static_cast<Index>(causal.a.size());
  check_lengths(y, mu.rows(), mu.cols(), m, p);
  const Index t_len = y.cols();

  ad::Var dev = ad::sub(tape.constant(y), mu);

  // Stationary density of the first p observations.
  ad::Var rp_chol = ad::cholesky(initial_block_cov(causal));
  ad::Var head = ad::vec(ad::block(dev, 0, 0, m, p));
  ad::Var head_quad = ad::sum_squares(ad::solve_lower(rp_chol, head));
  ad::Var head_logdet = ad::scale(ad::sum_log_diag(rp_chol), 2.0);
  ad::Var total = ad::add(head_logdet, head_quad);

  // One-step conditionals for t = p+1..T.
  if (t_len > p) {
    ad::Var sigma_chol = ad::cholesky(causal.sigma);
    ad::Var eps = residual_panel(dev, causal.a);
    ad::Var quad = ad::sum_squares(ad::solve_lower(sigma_chol, eps));
    ad::Var logdet = ad::scale(ad::sum_log_diag(sigma_chol), 2.0 * static_cast<double>(t_len - p));
    total = ad::add(total, ad::add(logdet, quad));
  }

  // n log(2 pi) with n = m T.
  const double constant = static_cast<double>(m * t_len) * std::log(2.0 * std::numbers::pi);
  return ad::scale(ad::add_scalar(total, constant), -0.5);
}

}  // namespace trendvar

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "trendvar/autodiff.hpp"

namespace trendvar {

enum class RegressorKind {
  /// (t/T, (t/T)^2, ..., (t/T)^d)
  Polynomial,
  /// Polynomial terms followed by (T/t, (T/t)^2, ..., (T/t)^d)
  PolynomialWithReciprocals,
};

/// Deterministic time regressors feeding the trend network. The scaling
/// denominator is the training length, including when t runs past it.
struct RegressorSpec {
  RegressorKind kind = RegressorKind::PolynomialWithReciprocals;
  int degree = 3;
  Index series_length = 1;

  Index input_dim() const;
};

/// x_t for a 1-based time t (t > series_length is allowed).
Vector regressor_at(const RegressorSpec& spec, Index t);
/// x_1..x_T.
std::vector<Vector> make_regressors(const RegressorSpec& spec);
/// Columns x_first..x_last as an input_dim x (last - first + 1) matrix.
Matrix regressor_matrix(const RegressorSpec& spec, Index first, Index last);

/// LSTM weights and the affine head mapping the hidden state to the trend.
struct TrendNetParams {
  Matrix w_xi, w_xf, w_xo, w_xc;  // units x input_dim
  Matrix w_hi, w_hf, w_ho, w_hc;  // units x units
  Vector b_i, b_f, b_o, b_c;      // units
  Matrix w_mu;                    // m x units
  Vector b_mu;                    // m

  Index units() const { return w_hi.rows(); }
  Index input_dim() const { return w_xi.cols(); }
  Index output_dim() const { return w_mu.rows(); }

  static TrendNetParams zeros(Index input_dim, Index units, Index output_dim);
  /// Weights uniform on (-1/sqrt(units), 1/sqrt(units)), biases zero.
  static TrendNetParams random(Index input_dim, Index units, Index output_dim, std::uint64_t seed);

  /// Flattened in declaration order; biases become single-column matrices.
  std::vector<Matrix> pack() const;
  static TrendNetParams unpack(const std::vector<Matrix>& parts);
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zero(Index units);
};

LstmState lstm_step(const Vector& x, const LstmState& state, const TrendNetParams& params);

/// mu_t = W_mu h_t + b_mu for each input, starting the recurrence at
/// `initial`. Returns an m x n matrix with one column per input.
Matrix trend_sequence(const std::vector<Vector>& xs, const TrendNetParams& params,
                      const LstmState& initial);
/// Same for regressors given column-wise, from a zero initial state.
Matrix trend_sequence(const Matrix& regressors, const TrendNetParams& params);

/// Trend network parameters registered on a tape.
struct TrendNetVars {
  ad::Var w_xi, w_xf, w_xo, w_xc;
  ad::Var w_hi, w_hf, w_ho, w_hc;
  ad::Var b_i, b_f, b_o, b_c;
  ad::Var w_mu, b_mu;

  std::vector<ad::Var> all() const;
};

TrendNetVars register_trend_params(ad::Tape& tape, const TrendNetParams& params);

/// Taped trend over column-wise regressors from a zero initial state; m x T.
ad::Var trend_sequence(const TrendNetVars& vars, const Matrix& regressors);

}  // namespace trendvar

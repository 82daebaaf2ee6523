// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "trendvar/autodiff.hpp"
#include "trendvar/types.hpp"

namespace trendvar {

/// Pivot-failure recovery for cholesky_factor. On failure the factorization
/// is retried with `initial_jitter * trace(m) / dim` added to the diagonal,
/// escalating by `escalation` per retry.
struct CholeskyOptions {
  double symmetry_tolerance = 1e-10;
  double initial_jitter = 1e-10;
  double escalation = 10.0;
  int max_retries = 3;
};

/// Lower Cholesky factor with positive diagonal of the symmetric part of m.
/// Throws NotPositiveDefinite when every retry fails and InvalidArgument when
/// m is not symmetric within the tolerance (relative to max |m_ij|).
Matrix cholesky_factor(const Matrix& m, const CholeskyOptions& options = {});

/// mp x mp companion matrix: A_1..A_p across the first block row, identity
/// blocks on the block sub-diagonal.
Matrix companion_matrix(const std::vector<Matrix>& a);

/// Largest eigenvalue modulus of the companion matrix of A_1..A_p.
double companion_spectral_radius(const std::vector<Matrix>& a);

/// Condition-number ceiling for the stationary covariance system; above it
/// the coefficients are treated as a near unit root.
inline constexpr double kMaxStationaryCondition = 1e12;

/// Covariance of the stacked state (y_t', ..., y_{t-p+1}')' of a stationary
/// VAR(p): solves vec(G) = (I - A*(x)A*)^{-1} vec(Sigma*). Block (i, j) of
/// the result is Gamma(j - i) with Gamma(k) = E[y_t y_{t-k}'].
/// Throws NearUnitRoot when the spectral radius is within 1e-12 of one or
/// the system condition estimate exceeds kMaxStationaryCondition.
ad::Var stationary_state_covariance(const std::vector<ad::Var>& a, const ad::Var& sigma);

/// Gamma(0..maxlag). Lags below p are read off the stacked-state covariance;
/// higher lags follow the Yule-Walker recursion Gamma(k) = sum_i A_i Gamma(k-i).
std::vector<Matrix> stationary_autocovariances(const CausalVarParams& causal, Index maxlag);

}  // namespace trendvar

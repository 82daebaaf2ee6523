// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "trendvar/autodiff.hpp"
#include "trendvar/types.hpp"
#include "trendvar/var_stability.hpp"

namespace trendvar {

/// Covariance of (y_1', ..., y_p')' under stationarity: block (i, j) is
/// Gamma(i - j), with Gamma(-k) = Gamma(k)'.
Matrix build_rp(const CausalVarParams& causal, Index p);

/// eps_t = (y_t - mu_t) - sum_i A_i (y_{t-i} - mu_{t-i}) for t = p+1..T.
/// `y` and `mu` are m x T panels; the result is m x (T - p).
Matrix residuals(const Matrix& y, const Matrix& mu, const CausalVarParams& causal);

/// Exact Gaussian log-likelihood of the panel `y` (m x T) given the trend
/// `mu` and a causal VAR(p). The first p observations enter through their
/// stationary joint density, the rest through one-step conditionals.
double log_likelihood(const Matrix& y, const Matrix& mu, const CausalVarParams& causal);

/// Taped form: differentiable in `mu` and in the causal parameters.
ad::Var log_likelihood(const Matrix& y, const ad::Var& mu, const CausalVars& causal);

}  // namespace trendvar

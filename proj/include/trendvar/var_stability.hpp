// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "trendvar/autodiff.hpp"
#include "trendvar/types.hpp"

namespace trendvar {

/// Unconstrained VAR block: arbitrary coefficient matrices and the packed
/// lower triangle of L (row by row), with Sigma = L L'.
struct RawVarParams {
  std::vector<Matrix> a_raw;
  Vector l_raw;

  Index dim() const;
  Index order() const { return static_cast<Index>(a_raw.size()); }
  Matrix lower() const;

  /// Zero coefficients and L = diag(l_diagonal).
  static RawVarParams initial(Index order, const Vector& l_diagonal);
  static Vector pack_lower(const Matrix& l);
};

/// Partial autocorrelation matrices; every P_j has singular values < 1.
struct PacfSequence {
  std::vector<Matrix> p_mats;
};

/// P_j = B_j^{-1} A_j where B_j B_j' = I + A_j A_j'.
PacfSequence to_pacf(const std::vector<Matrix>& a_raw);

/// Maps partial autocorrelations to causal coefficients through the
/// forward/backward prediction recursion, then rescales so the innovation
/// covariance is L L'.
CausalVarParams pacf_to_causal(const PacfSequence& pacf, const Matrix& l);

CausalVarParams enforce_causality(const RawVarParams& raw);

// Taped forms of the same maps, used during training.

std::vector<ad::Var> to_pacf(const std::vector<ad::Var>& a_raw);

struct CausalVars {
  std::vector<ad::Var> a;
  ad::Var sigma;
};

/// `l` is a lower-triangular m x m node.
CausalVars pacf_to_causal(const std::vector<ad::Var>& pacf, const ad::Var& l);

}  // namespace trendvar

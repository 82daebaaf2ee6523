// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendvar/autodiff.hpp"

namespace trendvar {

/// Observations with an integer time index. `values` is T x m: one row per
/// time point. Numerical routines take the transposed m x T "panel" where
/// column t is the observation vector at time t.
struct TimeSeriesFrame {
  std::vector<std::int64_t> index;
  Matrix values;
  std::vector<std::string> names;  // one per column, may be empty

  Index length() const { return values.rows(); }
  Index dim() const { return values.cols(); }
  Matrix panel() const { return values.transpose(); }
};

/// Coefficients of a causal VAR(p) and its innovation covariance.
struct CausalVarParams {
  std::vector<Matrix> a;  // A_1..A_p, each m x m
  Matrix sigma;           // m x m, symmetric positive-definite

  Index dim() const { return sigma.rows(); }
  Index order() const { return static_cast<Index>(a.size()); }
};

}  // namespace trendvar

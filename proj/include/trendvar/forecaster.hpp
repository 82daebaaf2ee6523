// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "trendvar/trainer.hpp"
#include "trendvar/types.hpp"

namespace trendvar {

/// VAR(1) form of a VAR(p): the companion matrix and the innovation
/// covariance of the stacked state (Sigma in the top-left block).
struct CompanionSystem {
  Matrix a_star;
  Matrix sigma_star;
};

CompanionSystem build_companion(const CausalVarParams& causal);

/// Best linear predictor for y_{T+1..T+h}. `y_hist` and `mu_hist` are m x n
/// panels ending at time T (n >= p); `mu_future` is m x h. Returns m x h.
Matrix point_forecast(const CausalVarParams& causal, const Matrix& y_hist, const Matrix& mu_hist,
                      const Matrix& mu_future);

/// Prediction-error covariances for horizons 1..h: the top-left m x m block of
/// sum_{i<l} A*^i Sigma* (A*^i)'.
std::vector<Matrix> forecast_covariance(const CausalVarParams& causal, Index h);

/// Two-sided standard-normal quantile for a central interval of `level`.
double interval_z(double level);
/// The rounded 95% multiplier used in some published tables.
inline constexpr double kRoundedZ95 = 1.96;

struct IntervalBounds {
  Matrix lower;
  Matrix upper;
};

/// point +/- z * sqrt(diag(cov_l)) for every horizon column l.
IntervalBounds prediction_intervals(const Matrix& points, const std::vector<Matrix>& covs, double z);

struct ForecastOptions {
  double level = 0.95;
  /// Use 1.96 instead of the exact quantile (only meaningful at level 0.95).
  bool rounded_z = false;
};

struct ForecastResult {
  Matrix points;                 // m x h
  std::vector<Matrix> error_covs;
  Matrix lower;                  // m x h
  Matrix upper;                  // m x h
  Matrix trend_path;             // m x h, mu_{T+1..T+h}
  double z = 0.0;

  Index horizon() const { return points.cols(); }
};

/// Forecast h steps past the end of `y` (m x T, the training panel or a
/// continuation of it) with the trained trend extended past T.
ForecastResult forecast(const FittedModel& model, const Matrix& y, Index h,
                        const ForecastOptions& options = {});

}  // namespace trendvar

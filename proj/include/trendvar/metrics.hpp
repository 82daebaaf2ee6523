// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "trendvar/types.hpp"

namespace trendvar {

struct EvalConfig {
  double alpha = 0.05;
  int seasonality = 4;
  std::vector<int> horizons{1, 2, 3, 4, 5, 6, 7, 8};
  int origins = 20;
  Index window = 166;

  void validate() const;
};

/// |actual - forecast| / |actual| * 100. Throws ZeroActual when actual == 0.
double ape(double actual, double forecast);

/// Mean absolute seasonal difference (1/(T-s)) sum_{t>s} |y_t - y_{t-s}|.
/// Throws DegenerateScale if it is zero.
double seasonal_scale(const std::vector<double>& history, int s);

/// Unscaled interval score with strict-inequality penalties.
double interval_score(double actual, double lower, double upper, double alpha);

/// Scaled interval score against the in-sample `history`.
double sis(double actual, double lower, double upper, const std::vector<double>& history,
           const EvalConfig& config);

/// One evaluated forecast. `ape` is NaN when the actual value was zero.
struct Score {
  int origin = 0;
  int series = 0;
  int horizon = 0;
  double actual = 0.0;
  double forecast = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double ape = 0.0;
  double sis = 0.0;
};

struct Summary {
  double ape = 0.0;
  double sis = 0.0;
  int scores_used = 0;
  int zero_actual_excluded = 0;
};

/// Mean over origins at each selected horizon, then mean over horizons.
/// Scores with other horizons are ignored. Throws EmptySelection when the
/// selection is empty or a selected horizon has no scores.
Summary aggregate(const std::vector<Score>& scores, const std::vector<int>& horizons);

/// Sample autocorrelations r_0..r_maxlag of each row of `series` (m x n),
/// biased estimator (divisor n). Returns (maxlag + 1) x m.
Matrix residual_acf(const Matrix& series, Index maxlag);

/// Normal QQ pairs (theoretical, empirical) for standardized data, sorted;
/// theoretical quantiles at (i - 0.5) / n.
std::vector<std::pair<double, double>> normal_qq(const std::vector<double>& values);

}  // namespace trendvar

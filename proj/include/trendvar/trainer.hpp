// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "trendvar/trend_net.hpp"
#include "trendvar/types.hpp"
#include "trendvar/var_stability.hpp"

namespace trendvar {

struct TrainConfig {
  int p = 2;
  int units = 20;
  RegressorKind regressor_kind = RegressorKind::PolynomialWithReciprocals;
  int regressor_degree = 3;
  double eta1 = 0.001;  // trend parameters, maximum-likelihood phase
  double eta2 = 0.01;   // VAR parameters
  int max_iters = 6000;
  double prec = 1e-5;
  int phase1_iters = 3000;
  double phase1_eta = 0.05;
  double adagrad_eps = 1e-10;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
};

/// Per-parameter AdaGrad accumulators for one parameter group.
struct AdaGradState {
  std::vector<Matrix> accum;
};

/// theta <- theta - eta * g / (sqrt(accum + g^2) + eps), accumulator first.
void adagrad_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                  AdaGradState& state, double eta, double eps = 1e-10);

struct OptimizerState {
  AdaGradState trend;  // Psi_1
  AdaGradState var;    // Psi_2
  int iter = 0;
  std::vector<double> loglik_history;  // last three values, oldest first
};

struct FittedModel {
  TrendNetParams trend;
  RawVarParams raw_var;
  CausalVarParams causal;
  RegressorSpec regressors;
  double final_loglik = 0.0;
  int iterations_used = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  int iter = 0;
  double loglik = 0.0;
  double rc1 = std::numeric_limits<double>::quiet_NaN();
  double rc2 = std::numeric_limits<double>::quiet_NaN();
  double spectral_radius = 0.0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Regressor layout the trainer uses for a series of length T.
RegressorSpec regressor_spec(const TrainConfig& config, Index series_length);

/// Least-squares pre-training of the trend network on sum_t |y_t - mu_t|^2,
/// starting from `init`. `y` is an m x T panel, `regressors` input_dim x T.
TrendNetParams phase1_pretrain(const Matrix& y, const Matrix& regressors, const TrainConfig& config,
                               TrendNetParams init);

/// Sum of squared trend errors for the given parameters.
double trend_sse(const Matrix& y, const Matrix& regressors, const TrendNetParams& params);

/// Starting point for the network before pre-training: random weights, zero
/// gate biases, head bias at the sample mean of y.
TrendNetParams initial_trend_params(const Matrix& y, const TrainConfig& config);

/// Starting VAR block: zero coefficients, L = diag(sd of first differences).
RawVarParams initial_var_params(const Matrix& y, int p);

/// Maximum-likelihood phase from given starting values. Returns the model at
/// the last evaluated iterate.
FittedModel train_likelihood(const Matrix& y, const TrainConfig& config, TrendNetParams trend,
                             RawVarParams raw, const IterationObserver& observer = {});

/// Full two-phase fit of the panel `y` (m x T).
FittedModel fit(const Matrix& y, const TrainConfig& config, const IterationObserver& observer = {});

/// Trend of a fitted model over times first..last (1-based, may exceed T).
Matrix fitted_trend(const FittedModel& model, Index first, Index last);

}  // namespace trendvar

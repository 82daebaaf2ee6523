// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "trendvar/random.hpp"
#include "trendvar/types.hpp"

namespace trendvar {

/// Smooth stand-in trends: per series a linear drift plus a seeded number of
/// logistic steps, all as functions of u = t/T.
struct SynthTrendOptions {
  int min_bumps = 3;
  int max_bumps = 6;
  double offset_scale = 1.0;  // intercept ~ U(-s, s)
  double drift_scale = 2.0;   // slope over [0, 1] ~ U(-s, s)
  double bump_scale = 3.0;    // step height ~ U(-s, s)
  double min_width = 0.03;    // logistic scale in units of u
  double max_width = 0.12;
};

/// m x T panel of smooth curves; identical for identical arguments.
Matrix synth_trend(Index m, Index T, std::uint64_t seed, const SynthTrendOptions& options = {});

struct ZeroTrend {};
struct SyntheticTrend {
  std::uint64_t seed = 0;
  SynthTrendOptions options;
};
struct TrendFile {
  std::string path;
};
/// Explicit m x T trend panel.
struct GivenTrend {
  Matrix mu;
};
using TrendSource = std::variant<ZeroTrend, SyntheticTrend, TrendFile, GivenTrend>;

enum class InitMode { Stationary, BurnIn };

struct SimSpec {
  CausalVarParams causal;
  TrendSource trend = ZeroTrend{};
  Index length = 800;
  int replications = 1;
  std::uint64_t seed = 0;
  InitMode init = InitMode::Stationary;
  Index burn_in = 500;
};

/// The m x T trend a SimSpec refers to. Throws TrendLengthMismatch when a file
/// or given trend is shorter than T; longer inputs are truncated.
Matrix resolve_trend(const TrendSource& source, Index m, Index T);

/// Zero-mean VAR deviations y_t - mu_t, m x T, drawn from `engine`.
Matrix simulate_deviations(const CausalVarParams& causal, Index T, InitMode init, Index burn_in,
                           Engine& engine);

/// One m x T panel per replication. Replication r draws from substream r of
/// the SimSpec seed, so output does not depend on scheduling.
std::vector<Matrix> simulate(const SimSpec& spec);

/// Mean absolute deviation between two trend panels.
double mad(const Matrix& estimated, const Matrix& truth);

/// The three-series VAR(2) used for the estimation study (p = 2, m = 3).
CausalVarParams benchmark_var2_params();

}  // namespace trendvar

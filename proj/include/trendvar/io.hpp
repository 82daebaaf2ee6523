// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trendvar/forecaster.hpp"
#include "trendvar/metrics.hpp"
#include "trendvar/simulation.hpp"
#include "trendvar/trainer.hpp"
#include "trendvar/types.hpp"

namespace trendvar {

/// Reads a `t,<name_1>,...,<name_m>` CSV. Times must be consecutive
/// integers. Blank trailing lines are ignored.
TimeSeriesFrame read_series_csv(const std::string& path);
TimeSeriesFrame parse_series_csv(const std::string& text, const std::string& source = "<input>");

/// Trend file (`t,mu_1,...,mu_m`) as an m x T panel.
Matrix read_trend_csv(const std::string& path);

/// Writes `panel` (m x T) with times first_t.. and column prefix `prefix`
/// (headers prefix_1..prefix_m). Values use round-trip precision.
void write_panel_csv(const std::string& path, const Matrix& panel, const std::string& prefix,
                     std::int64_t first_t = 1);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Persisted fit: the model plus the configuration that produced it.
struct ModelArchive {
  static constexpr int kFormatVersion = 1;
  FittedModel model;
  TrainConfig config;
  /// Time index of the first training observation.
  std::int64_t first_t = 1;
};

std::string archive_to_json(const ModelArchive& archive);
ModelArchive archive_from_json(const std::string& text);
void save_archive(const std::string& path, const ModelArchive& archive);
ModelArchive load_archive(const std::string& path);

/// Simulation settings as read from a config file. Coefficients default to
/// the three-series benchmark.
struct SimSettings {
  CausalVarParams causal = benchmark_var2_params();
  Index length = 800;
  int replications = 1;
  InitMode init = InitMode::Stationary;
  Index burn_in = 500;
  /// "zero", "synthetic" or a trend CSV path.
  std::string trend = "synthetic";
};

struct RunConfig {
  std::uint64_t seed = 0;
  TrainConfig train;
  SimSettings sim;
  EvalConfig eval;
  ForecastOptions forecast;
  Index horizon = 8;
};

/// INI file with optional sections [run], [train], [simulate], [forecast],
/// [evaluate]. Unknown keys are rejected.
RunConfig read_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace trendvar

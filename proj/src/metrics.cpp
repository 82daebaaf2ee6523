// SPDX-License-Identifier: Apache-2.0
#include "trendvar/metrics.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "trendvar/errors.hpp"

namespace trendvar {

void EvalConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be in (0, 1)");
  if (seasonality < 1) throw Error(ErrorKind::InvalidArgument, "seasonality must be >= 1");
  if (horizons.empty()) throw Error(ErrorKind::EmptySelection, "no horizons selected");
  for (int h : horizons) {
    if (h < 1) throw Error(ErrorKind::HorizonZero, "horizons must be >= 1");
  }
  if (origins < 1) throw Error(ErrorKind::InvalidArgument, "origins must be >= 1");
  if (window <= seasonality) throw Error(ErrorKind::InvalidArgument, "window must exceed seasonality");
}

double ape(double actual, double forecast) {
  if (actual == 0.0) throw Error(ErrorKind::ZeroActual, "APE undefined for a zero actual value");
  return std::abs(actual - forecast) / std::abs(actual) * 100.0;
}

double seasonal_scale(const std::vector<double>& history, int s) {
  if (s < 1) throw Error(ErrorKind::InvalidArgument, "seasonality must be >= 1");
  const std::size_t n = history.size();
  if (n <= static_cast<std::size_t>(s)) {
    throw Error(ErrorKind::LengthMismatch, "SIS history must be longer than the seasonality");
  }
  double total = 0.0;
  for (std::size_t t = static_cast<std::size_t>(s); t < n; ++t) {
    total += std::abs(history[t] - history[t - static_cast<std::size_t>(s)]);
  }
  const double scale = total / static_cast<double>(n - static_cast<std::size_t>(s));
  if (!(scale > 0.0)) {
    throw Error(ErrorKind::DegenerateScale, "seasonal differences of the history are all zero");
  }
  return scale;
}

double interval_score(double actual, double lower, double upper, double alpha) {
  if (!(lower <= upper)) throw Error(ErrorKind::InvalidArgument, "interval lower bound exceeds upper");
  double score = upper - lower;
  if (actual < lower) score += 2.0 / alpha * (lower - actual);
  if (actual > upper) score += 2.0 / alpha * (actual - upper);
  return score;
}

double sis(double actual, double lower, double upper, const std::vector<double>& history,
           const EvalConfig& config) {
  return interval_score(actual, lower, upper, config.alpha) /
         seasonal_scale(history, config.seasonality);
}

Summary aggregate(const std::vector<Score>& scores, const std::vector<int>& horizons) {
  if (horizons.empty()) throw Error(ErrorKind::EmptySelection, "aggregate: no horizons selected");
  struct Acc {
    double ape = 0.0;
    int ape_n = 0;
    double sis = 0.0;
    int sis_n = 0;
    int zero = 0;
  };
  std::map<int, Acc> by_h;
  for (int h : horizons) by_h[h];
  for (const Score& s : scores) {
    auto it = by_h.find(s.horizon);
    if (it == by_h.end()) continue;
    Acc& acc = it->second;
    acc.sis += s.sis;
    ++acc.sis_n;
    if (std::isnan(s.ape)) {
      ++acc.zero;
    } else {
      acc.ape += s.ape;
      ++acc.ape_n;
    }
  }
  Summary out;
  double ape_sum = 0.0;
  int ape_h = 0;
  for (const auto& [h, acc] : by_h) {
    if (acc.sis_n == 0) {
      throw Error(ErrorKind::EmptySelection, "aggregate: no scores at horizon " + std::to_string(h));
    }
    out.sis += acc.sis / acc.sis_n;
    out.scores_used += acc.sis_n;
    out.zero_actual_excluded += acc.zero;
    if (acc.ape_n > 0) {
      ape_sum += acc.ape / acc.ape_n;
      ++ape_h;
    }
  }
  out.sis /= static_cast<double>(by_h.size());
  out.ape = ape_h > 0 ? ape_sum / ape_h : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Matrix residual_acf(const Matrix& series, Index maxlag) {
  const Index n = series.cols();
  if (n < 1) throw Error(ErrorKind::EmptyData, "acf: empty series");
  if (maxlag < 0 || maxlag >= n) throw Error(ErrorKind::InvalidArgument, "acf: need 0 <= maxlag < n");
  Matrix out(maxlag + 1, series.rows());
  for (Index k = 0; k < series.rows(); ++k) {
    const Eigen::RowVectorXd x = series.row(k).array() - series.row(k).mean();
    const double c0 = x.squaredNorm() / static_cast<double>(n);
    for (Index lag = 0; lag <= maxlag; ++lag) {
      const double c = x.head(n - lag).dot(x.tail(n - lag)) / static_cast<double>(n);
      out(lag, k) = c0 > 0.0 ? c / c0 : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::vector<std::pair<double, double>> normal_qq(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorKind::EmptyData, "qq: need at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const boost::math::normal_distribution<double> normal;
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double empirical = sd > 0.0 ? (sorted[i] - mean) / sd : 0.0;
    out.emplace_back(boost::math::quantile(normal, prob), empirical);
  }
  return out;
}

}  // namespace trendvar

// SPDX-License-Identifier: Apache-2.0
#include "trendvar/forecaster.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

#include "trendvar/errors.hpp"
#include "trendvar/numerics.hpp"

namespace trendvar {

CompanionSystem build_companion(const CausalVarParams& causal) {
  const Index m = causal.dim();
  const Index n = m * causal.order();
  CompanionSystem sys;
  sys.a_star = companion_matrix(causal.a);
  sys.sigma_star = Matrix::Zero(n, n);
  sys.sigma_star.topLeftCorner(m, m) = causal.sigma;
  return sys;
}

namespace {

// (x_T', x_{T-1}', ..., x_{T-p+1}')' from the last p columns of a panel.
Vector stack_state(const Matrix& panel, Index p) {
  const Index m = panel.rows();
  Vector s(m * p);
  for (Index i = 0; i < p; ++i) s.segment(i * m, m) = panel.col(panel.cols() - 1 - i);
  return s;
}

}  // namespace

Matrix point_forecast(const CausalVarParams& causal, const Matrix& y_hist, const Matrix& mu_hist,
                      const Matrix& mu_future) {
  const Index m = causal.dim();
  const Index p = causal.order();
  const Index h = mu_future.cols();
  if (h < 1) throw Error(ErrorKind::HorizonZero, "forecast horizon must be >= 1");
  if (y_hist.rows() != m || mu_hist.rows() != m || mu_future.rows() != m) {
    throw Error(ErrorKind::LengthMismatch, "forecast: dimension mismatch");
  }
  if (y_hist.cols() != mu_hist.cols() || y_hist.cols() < p) {
    throw Error(ErrorKind::LengthMismatch, "forecast: need at least p aligned observations");
  }
  const Matrix a_star = companion_matrix(causal.a);
  Vector dev = stack_state(y_hist - mu_hist, p);
  Matrix out(m, h);
  for (Index l = 0; l < h; ++l) {
    dev = a_star * dev;
    out.col(l) = dev.head(m) + mu_future.col(l);
  }
  return out;
}

std::vector<Matrix> forecast_covariance(const CausalVarParams& causal, Index h) {
  if (h < 1) throw Error(ErrorKind::HorizonZero, "forecast horizon must be >= 1");
  const CompanionSystem sys = build_companion(causal);
  const Index m = causal.dim();
  const Index n = sys.a_star.rows();
  std::vector<Matrix> covs;
  covs.reserve(static_cast<std::size_t>(h));
  Matrix power = Matrix::Identity(n, n);
  Matrix accum = Matrix::Zero(n, n);
  for (Index l = 0; l < h; ++l) {
    accum += power * sys.sigma_star * power.transpose();
    covs.push_back(accum.topLeftCorner(m, m));
    power = sys.a_star * power;
  }
  return covs;
}

double interval_z(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "interval level must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

IntervalBounds prediction_intervals(const Matrix& points, const std::vector<Matrix>& covs, double z) {
  if (static_cast<Index>(covs.size()) != points.cols()) {
    throw Error(ErrorKind::LengthMismatch, "intervals: one covariance per horizon required");
  }
  IntervalBounds b{points, points};
  for (Index l = 0; l < points.cols(); ++l) {
    const Vector sd = covs[static_cast<std::size_t>(l)].diagonal().cwiseMax(0.0).cwiseSqrt();
    b.lower.col(l) -= z * sd;
    b.upper.col(l) += z * sd;
  }
  return b;
}

ForecastResult forecast(const FittedModel& model, const Matrix& y, Index h,
                        const ForecastOptions& options) {
  if (h < 1) throw Error(ErrorKind::HorizonZero, "forecast horizon must be >= 1");
  const Index t_len = y.cols();
  const Index p = model.causal.order();
  if (t_len < p) throw Error(ErrorKind::LengthMismatch, "forecast: need at least p observations");
  const Matrix mu = fitted_trend(model, 1, t_len + h);

  ForecastResult r;
  r.trend_path = mu.rightCols(h);
  r.points = point_forecast(model.causal, y, mu.leftCols(t_len), r.trend_path);
  r.error_covs = forecast_covariance(model.causal, h);
  r.z = options.rounded_z ? kRoundedZ95 : interval_z(options.level);
  IntervalBounds b = prediction_intervals(r.points, r.error_covs, r.z);
  r.lower = std::move(b.lower);
  r.upper = std::move(b.upper);
  return r;
}

}  // namespace trendvar

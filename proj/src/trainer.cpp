// SPDX-License-Identifier: Apache-2.0
#include "trendvar/trainer.hpp"

#include <cmath>
#include <sstream>

#include "trendvar/errors.hpp"
#include "trendvar/likelihood.hpp"
#include "trendvar/numerics.hpp"

namespace trendvar {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (p < 1) fail("lag order p must be >= 1");
  if (units < 1) fail("units must be >= 1");
  if (regressor_degree < 1) fail("regressor degree must be >= 1");
  if (!(eta1 >= 0.0) || !(eta2 >= 0.0) || !(phase1_eta >= 0.0)) fail("learning rates must be >= 0");
  if (max_iters < 1) fail("max_iters K must be >= 1");
  if (!(prec > 0.0)) fail("prec must be > 0");
  if (phase1_iters < 0) fail("phase1_iters must be >= 0");
  if (!(adagrad_eps >= 0.0)) fail("adagrad_eps must be >= 0");
}

void adagrad_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                  AdaGradState& state, double eta, double eps) {
  if (params.size() != grads.size()) {
    throw Error(ErrorKind::InvalidArgument, "adagrad: parameter/gradient count mismatch");
  }
  if (state.accum.empty()) {
    state.accum.reserve(params.size());
    for (const Matrix& p : params) state.accum.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Matrix& g = grads[k];
    if (g.rows() != params[k].rows() || g.cols() != params[k].cols()) {
      throw Error(ErrorKind::InvalidArgument, "adagrad: gradient shape mismatch");
    }
    state.accum[k].array() += g.array().square();
    params[k].array() -= eta * g.array() / (state.accum[k].array().sqrt() + eps);
  }
}

RegressorSpec regressor_spec(const TrainConfig& config, Index series_length) {
  RegressorSpec spec;
  spec.kind = config.regressor_kind;
  spec.degree = config.regressor_degree;
  spec.series_length = series_length;
  return spec;
}

double trend_sse(const Matrix& y, const Matrix& regressors, const TrendNetParams& params) {
  return (y - trend_sequence(regressors, params)).squaredNorm();
}

TrendNetParams phase1_pretrain(const Matrix& y, const Matrix& regressors, const TrainConfig& config,
                               TrendNetParams init) {
  if (y.cols() < 2) throw Error(ErrorKind::LengthMismatch, "phase 1 needs T >= 2");
  if (regressors.cols() != y.cols()) {
    throw Error(ErrorKind::LengthMismatch, "phase 1: regressor and series lengths differ");
  }
  std::vector<Matrix> params = init.pack();
  AdaGradState state;
  for (int k = 0; k < config.phase1_iters; ++k) {
    ad::Tape tape;
    const TrendNetVars vars = register_trend_params(tape, TrendNetParams::unpack(params));
    ad::Var mu = trend_sequence(vars, regressors);
    ad::Var loss = ad::sum_squares(ad::sub(tape.constant(y), mu));
    if (!std::isfinite(loss.scalar())) {
      throw Error(ErrorKind::DivergedLoss,
                  "phase 1: squared-error loss is not finite at iteration " + std::to_string(k));
    }
    ad::GradientResult grad = tape.gradient(loss);
    adagrad_step(params, grad.grads, state, config.phase1_eta, config.adagrad_eps);
  }
  return TrendNetParams::unpack(params);
}

TrendNetParams initial_trend_params(const Matrix& y, const TrainConfig& config) {
  const RegressorSpec spec = regressor_spec(config, y.cols());
  TrendNetParams params =
      TrendNetParams::random(spec.input_dim(), config.units, y.rows(), config.seed);
  params.b_mu = y.rowwise().mean();
  return params;
}

RawVarParams initial_var_params(const Matrix& y, int p) {
  const Index m = y.rows();
  Vector sd = Vector::Ones(m);
  if (y.cols() >= 3) {
    const Matrix diffs = y.rightCols(y.cols() - 1) - y.leftCols(y.cols() - 1);
    const Vector mean = diffs.rowwise().mean();
    for (Index i = 0; i < m; ++i) {
      const double var = (diffs.row(i).array() - mean(i)).square().sum() /
                         static_cast<double>(diffs.cols() - 1);
      if (var > 1e-24) sd(i) = std::sqrt(var);
    }
  }
  return RawVarParams::initial(p, sd);
}

namespace {

std::vector<Matrix> pack_var(const RawVarParams& raw) {
  std::vector<Matrix> out = raw.a_raw;
  out.push_back(Matrix(raw.l_raw));
  return out;
}

RawVarParams unpack_var(const std::vector<Matrix>& parts) {
  RawVarParams raw;
  raw.a_raw.assign(parts.begin(), parts.end() - 1);
  raw.l_raw = parts.back().col(0);
  return raw;
}

double relative_change(double current, double previous) {
  return std::abs((current - previous) / previous);
}

}  // namespace

FittedModel train_likelihood(const Matrix& y, const TrainConfig& config, TrendNetParams trend,
                             RawVarParams raw, const IterationObserver& observer) {
  config.validate();
  const Index m = y.rows();
  const Index t_len = y.cols();
  if (raw.order() != config.p || raw.dim() != m) {
    throw Error(ErrorKind::InvalidArgument, "training: VAR block does not match (m, p)");
  }
  const RegressorSpec spec = regressor_spec(config, t_len);
  const Matrix regressors = regressor_matrix(spec, 1, t_len);

  std::vector<Matrix> psi1 = trend.pack();
  std::vector<Matrix> psi2 = pack_var(raw);
  const std::size_t n_trend = psi1.size();

  OptimizerState state;
  double last_loglik = 0.0;
  bool converged = false;

  for (int k = 0;; ++k) {
    state.iter = k;
    ad::Tape tape;
    const TrendNetVars trend_vars = register_trend_params(tape, TrendNetParams::unpack(psi1));
    std::vector<ad::Var> a_vars;
    for (std::size_t i = 0; i + 1 < psi2.size(); ++i) a_vars.push_back(tape.parameter(psi2[i]));
    ad::Var l_var = tape.parameter(psi2.back());

    ad::Var loglik;
    CausalVars causal;
    try {
      ad::Var mu = trend_sequence(trend_vars, regressors);
      causal = pacf_to_causal(to_pacf(a_vars), ad::fill_lower(l_var, m));
      loglik = log_likelihood(y, mu, causal);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (iteration " + std::to_string(k) + ")");
    }
    last_loglik = loglik.scalar();
    if (!std::isfinite(last_loglik)) {
      throw Error(ErrorKind::DivergedLoss,
                  "log-likelihood is not finite at iteration " + std::to_string(k));
    }

    auto& hist = state.loglik_history;
    hist.push_back(last_loglik);
    if (hist.size() > 3) hist.erase(hist.begin());

    IterationRecord record;
    record.iter = k;
    record.loglik = last_loglik;
    if (hist.size() >= 2) record.rc2 = relative_change(hist[hist.size() - 1], hist[hist.size() - 2]);
    if (hist.size() >= 3) record.rc1 = relative_change(hist[1], hist[0]);
    if (observer) {
      std::vector<Matrix> a_values;
      for (const ad::Var& ai : causal.a) a_values.push_back(ai.value());
      record.spectral_radius = companion_spectral_radius(a_values);
      observer(record);
    }

    if (hist.size() >= 3 && record.rc1 <= config.prec && record.rc2 <= config.prec) {
      converged = true;
      break;
    }
    if (k >= config.max_iters) break;

    ad::GradientResult grad = tape.gradient(ad::scale(loglik, -1.0));
    std::vector<Matrix> g1(grad.grads.begin(), grad.grads.begin() + static_cast<long>(n_trend));
    std::vector<Matrix> g2(grad.grads.begin() + static_cast<long>(n_trend), grad.grads.end());
    adagrad_step(psi1, g1, state.trend, config.eta1, config.adagrad_eps);
    adagrad_step(psi2, g2, state.var, config.eta2, config.adagrad_eps);
  }

  FittedModel model;
  model.trend = TrendNetParams::unpack(psi1);
  model.raw_var = unpack_var(psi2);
  model.causal = enforce_causality(model.raw_var);
  model.regressors = spec;
  model.final_loglik = last_loglik;
  model.iterations_used = state.iter;
  model.converged = converged;
  model.seed = config.seed;
  return model;
}

FittedModel fit(const Matrix& y, const TrainConfig& config, const IterationObserver& observer) {
  config.validate();
  if (y.cols() <= config.p) {
    std::ostringstream msg;
    msg << "fit requires T > p (got T = " << y.cols() << ", p = " << config.p << ")";
    throw Error(ErrorKind::LengthMismatch, msg.str());
  }
  if (!y.allFinite()) throw Error(ErrorKind::NonNumeric, "fit: series contains non-finite values");
  const RegressorSpec spec = regressor_spec(config, y.cols());
  const Matrix regressors = regressor_matrix(spec, 1, y.cols());
  TrendNetParams trend = phase1_pretrain(y, regressors, config, initial_trend_params(y, config));
  return train_likelihood(y, config, std::move(trend), initial_var_params(y, config.p), observer);
}

Matrix fitted_trend(const FittedModel& model, Index first, Index last) {
  if (first < 1 || last < first) throw Error(ErrorKind::InvalidArgument, "fitted_trend: bad range");
  const Matrix mu = trend_sequence(regressor_matrix(model.regressors, 1, last), model.trend);
  return mu.rightCols(last - first + 1);
}

}  // namespace trendvar

// SPDX-License-Identifier: Apache-2.0
#include "trendvar/trend_net.hpp"

#include <cmath>

#include "trendvar/errors.hpp"
#include "trendvar/random.hpp"

namespace trendvar {

Index RegressorSpec::input_dim() const {
  return kind == RegressorKind::Polynomial ? degree : 2 * degree;
}

Vector regressor_at(const RegressorSpec& spec, Index t) {
  if (spec.degree < 1 || spec.series_length < 1 || t < 1) {
    throw Error(ErrorKind::InvalidArgument, "regressors: need degree >= 1, T >= 1, t >= 1");
  }
  const double u = static_cast<double>(t) / static_cast<double>(spec.series_length);
  Vector x(spec.input_dim());
  double power = 1.0;
  for (int k = 0; k < spec.degree; ++k) {
    power *= u;
    x(k) = power;
  }
  if (spec.kind == RegressorKind::PolynomialWithReciprocals) {
    const double r = 1.0 / u;
    power = 1.0;
    for (int k = 0; k < spec.degree; ++k) {
      power *= r;
      x(spec.degree + k) = power;
    }
  }
  return x;
}

std::vector<Vector> make_regressors(const RegressorSpec& spec) {
  std::vector<Vector> xs;
  xs.reserve(static_cast<std::size_t>(spec.series_length));
  for (Index t = 1; t <= spec.series_length; ++t) xs.push_back(regressor_at(spec, t));
  return xs;
}

Matrix regressor_matrix(const RegressorSpec& spec, Index first, Index last) {
  if (last < first) throw Error(ErrorKind::InvalidArgument, "regressors: empty range");
  Matrix x(spec.input_dim(), last - first + 1);
  for (Index t = first; t <= last; ++t) x.col(t - first) = regressor_at(spec, t);
  return x;
}

TrendNetParams TrendNetParams::zeros(Index input_dim, Index units, Index output_dim) {
  TrendNetParams p;
  for (Matrix* w : {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc}) *w = Matrix::Zero(units, input_dim);
  for (Matrix* w : {&p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc}) *w = Matrix::Zero(units, units);
  for (Vector* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_c}) *b = Vector::Zero(units);
  p.w_mu = Matrix::Zero(output_dim, units);
  p.b_mu = Vector::Zero(output_dim);
  return p;
}

TrendNetParams TrendNetParams::random(Index input_dim, Index units, Index output_dim,
                                      std::uint64_t seed) {
  TrendNetParams p = zeros(input_dim, units, output_dim);
  Engine engine = make_engine(seed, streams::kTrendInit);
  const double bound = 1.0 / std::sqrt(static_cast<double>(units));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Matrix* w : {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xc, &p.w_hi, &p.w_hf, &p.w_ho, &p.w_hc,
                    &p.w_mu}) {
    for (Index j = 0; j < w->cols(); ++j) {
      for (Index i = 0; i < w->rows(); ++i) (*w)(i, j) = dist(engine);
    }
  }
  return p;
}

std::vector<Matrix> TrendNetParams::pack() const {
  return {w_xi, w_xf, w_xo, w_xc, w_hi, w_hf, w_ho, w_hc, b_i, b_f, b_o, b_c, w_mu, b_mu};
}

TrendNetParams TrendNetParams::unpack(const std::vector<Matrix>& parts) {
  if (parts.size() != 14) throw Error(ErrorKind::InvalidArgument, "trend params: expected 14 blocks");
  TrendNetParams p;
  p.w_xi = parts[0];
  p.w_xf = parts[1];
  p.w_xo = parts[2];
  p.w_xc = parts[3];
  p.w_hi = parts[4];
  p.w_hf = parts[5];
  p.w_ho = parts[6];
  p.w_hc = parts[7];
  p.b_i = parts[8].col(0);
  p.b_f = parts[9].col(0);
  p.b_o = parts[10].col(0);
  p.b_c = parts[11].col(0);
  p.w_mu = parts[12];
  p.b_mu = parts[13].col(0);
  return p;
}

LstmState LstmState::zero(Index units) { return {Vector::Zero(units), Vector::Zero(units)}; }

namespace {

Vector logistic(const Vector& z) {
  return z.unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

}  // namespace

LstmState lstm_step(const Vector& x, const LstmState& state, const TrendNetParams& p) {
  if (x.size() != p.input_dim() || state.h.size() != p.units() || state.c.size() != p.units()) {
    throw Error(ErrorKind::InvalidArgument, "lstm_step: shape mismatch");
  }
  const Vector i = logistic(p.w_xi * x + p.w_hi * state.h + p.b_i);
  const Vector f = logistic(p.w_xf * x + p.w_hf * state.h + p.b_f);
  const Vector o = logistic(p.w_xo * x + p.w_ho * state.h + p.b_o);
  const Vector g = (p.w_xc * x + p.w_hc * state.h + p.b_c).array().tanh();
  LstmState next;
  next.c = f.cwiseProduct(state.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(Vector(next.c.array().tanh()));
  return next;
}

Matrix trend_sequence(const std::vector<Vector>& xs, const TrendNetParams& params,
                      const LstmState& initial) {
  Matrix mu(params.output_dim(), static_cast<Index>(xs.size()));
  LstmState state = initial;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    state = lstm_step(xs[t], state, params);
    mu.col(static_cast<Index>(t)) = params.w_mu * state.h + params.b_mu;
  }
  return mu;
}

Matrix trend_sequence(const Matrix& regressors, const TrendNetParams& params) {
  std::vector<Vector> xs;
  xs.reserve(static_cast<std::size_t>(regressors.cols()));
  for (Index t = 0; t < regressors.cols(); ++t) xs.push_back(regressors.col(t));
  return trend_sequence(xs, params, LstmState::zero(params.units()));
}

std::vector<ad::Var> TrendNetVars::all() const {
  return {w_xi, w_xf, w_xo, w_xc, w_hi, w_hf, w_ho, w_hc, b_i, b_f, b_o, b_c, w_mu, b_mu};
}

TrendNetVars register_trend_params(ad::Tape& tape, const TrendNetParams& params) {
  const std::vector<Matrix> parts = params.pack();
  TrendNetVars v;
  std::vector<ad::Var*> slots = {&v.w_xi, &v.w_xf, &v.w_xo, &v.w_xc, &v.w_hi,
                                 &v.w_hf, &v.w_ho, &v.w_hc, &v.b_i,  &v.b_f,
                                 &v.b_o,  &v.b_c,  &v.w_mu, &v.b_mu};
  for (std::size_t k = 0; k < parts.size(); ++k) *slots[k] = tape.parameter(parts[k]);
  return v;
}

ad::Var trend_sequence(const TrendNetVars& v, const Matrix& regressors) {
  ad::Tape& tape = v.w_xi.tape();
  const Index units = v.w_hi.rows();
  const Index steps = regressors.cols();
  if (regressors.rows() != v.w_xi.cols() || steps < 1) {
    throw Error(ErrorKind::InvalidArgument, "trend_sequence: regressor shape mismatch");
  }
  // Gate order in the stacked pre-activation: input, forget, output, candidate.
  ad::Var w_x = ad::vcat({v.w_xi, v.w_xf, v.w_xo, v.w_xc});
  ad::Var w_h = ad::vcat({v.w_hi, v.w_hf, v.w_ho, v.w_hc});
  ad::Var bias = ad::vcat({v.b_i, v.b_f, v.b_o, v.b_c});
  ad::Var input_part = ad::add_col(ad::matmul(w_x, tape.constant(regressors)), bias);

  std::vector<ad::Var> hidden;
  hidden.reserve(static_cast<std::size_t>(steps));
  ad::Var h;
  ad::Var c;
  for (Index t = 0; t < steps; ++t) {
    ad::Var z = ad::block(input_part, 0, t, 4 * units, 1);
    if (t > 0) z = ad::add(z, ad::matmul(w_h, h));
    ad::Var act = ad::lstm_activation(z, units);
    ad::Var gate_i = ad::block(act, 0, 0, units, 1);
    ad::Var gate_o = ad::block(act, 2 * units, 0, units, 1);
    ad::Var cand = ad::block(act, 3 * units, 0, units, 1);
    if (t == 0) {
      c = ad::hadamard(gate_i, cand);
    } else {
      ad::Var gate_f = ad::block(act, units, 0, units, 1);
      c = ad::add(ad::hadamard(gate_f, c), ad::hadamard(gate_i, cand));
    }
    h = ad::hadamard(gate_o, ad::tanh(c));
    hidden.push_back(h);
  }
  return ad::add_col(ad::matmul(v.w_mu, ad::hcat(hidden)), v.b_mu);
}

}  // namespace trendvar

// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"
#include "trendvar/errors.hpp"
#include "trendvar/likelihood.hpp"
#include "trendvar/numerics.hpp"
#include "trendvar/random.hpp"
#include "trendvar/simulation.hpp"
#include "trendvar/trainer.hpp"

using namespace trendvar;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

TrainConfig small_config() {
  TrainConfig c;
  c.units = 4;
  c.phase1_iters = 50;
  c.max_iters = 40;
  c.seed = 3;
  return c;
}

Matrix ar1_series(double a, Index t_len, std::uint64_t seed) {
  CausalVarParams c{{scalar(a)}, Matrix::Identity(1, 1)};
  Engine engine = make_engine(seed, 0);
  return simulate_deviations(c, t_len, InitMode::Stationary, 0, engine);
}

}  // namespace

TEST_CASE("first AdaGrad step moves by eta times the sign") {
  std::vector<Matrix> theta{scalar(1.0)};
  AdaGradState state;
  adagrad_step(theta, {scalar(3.0)}, state, 0.01);
  CHECK(theta[0](0, 0) == doctest::Approx(1.0 - 0.01).epsilon(1e-10));
  CHECK(state.accum[0](0, 0) == 9.0);
}

TEST_CASE("zero gradient leaves parameters and accumulator alone") {
  std::vector<Matrix> theta{scalar(2.0)};
  AdaGradState state;
  adagrad_step(theta, {scalar(0.0)}, state, 0.5);
  CHECK(theta[0](0, 0) == 2.0);
  CHECK(state.accum[0](0, 0) == 0.0);
}

TEST_CASE("second AdaGrad step uses the accumulated squares") {
  const double eta = 0.1;
  std::vector<Matrix> theta{scalar(0.0)};
  AdaGradState state;
  adagrad_step(theta, {scalar(4.0)}, state, eta);
  const double before = theta[0](0, 0);
  adagrad_step(theta, {scalar(3.0)}, state, eta);
  CHECK(theta[0](0, 0) - before == doctest::Approx(-0.6 * eta).epsilon(1e-9));
}

TEST_CASE("AdaGrad accumulators never decrease") {
  std::mt19937_64 rng(1);
  std::vector<Matrix> theta{Matrix::Zero(3, 2)};
  AdaGradState state;
  Matrix prev = Matrix::Zero(3, 2);
  for (int k = 0; k < 50; ++k) {
    adagrad_step(theta, {testing::uniform_matrix(rng, 3, 2, -2, 2)}, state, 0.1);
    CHECK((state.accum[0].array() >= prev.array()).all());
    prev = state.accum[0];
  }
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.prec = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = TrainConfig{};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = TrainConfig{};
  c.eta1 = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = TrainConfig{};
  CHECK(c.eta1 == 0.001);
  CHECK(c.eta2 == 0.01);
  CHECK(c.max_iters == 6000);
  CHECK(c.prec == 1e-5);
  CHECK(c.units == 20);
}

TEST_CASE("phase 1 with zero iterations returns its starting point") {
  TrainConfig c = small_config();
  c.phase1_iters = 0;
  const Matrix y = Matrix::Random(2, 20);
  const TrendNetParams init = initial_trend_params(y, c);
  const RegressorSpec spec = regressor_spec(c, 20);
  const TrendNetParams out = phase1_pretrain(y, regressor_matrix(spec, 1, 20), c, init);
  CHECK(out.pack() == init.pack());
}

TEST_CASE("phase 1 fits a constant series") {
  TrainConfig c = small_config();
  c.phase1_iters = 3000;
  const Matrix y = Matrix::Constant(1, 60, 2.5);
  const RegressorSpec spec = regressor_spec(c, 60);
  const Matrix xs = regressor_matrix(spec, 1, 60);
  const TrendNetParams out = phase1_pretrain(y, xs, c, initial_trend_params(y, c));
  CHECK((trend_sequence(xs, out).array() - 2.5).abs().maxCoeff() < 1e-3);
}

TEST_CASE("phase 1 improves on the zero trend for a linear series") {
  TrainConfig c = small_config();
  c.phase1_iters = 500;
  c.regressor_kind = RegressorKind::Polynomial;
  Matrix y(1, 80);
  for (Index t = 0; t < 80; ++t) y(0, t) = static_cast<double>(t + 1) / 80.0;
  const RegressorSpec spec = regressor_spec(c, 80);
  const Matrix xs = regressor_matrix(spec, 1, 80);
  const TrendNetParams out = phase1_pretrain(y, xs, c, initial_trend_params(y, c));
  CHECK(trend_sse(y, xs, out) < y.squaredNorm());
  CHECK(trend_sse(y, xs, out) < trend_sse(y, xs, initial_trend_params(y, c)));
}

TEST_CASE("starting VAR block") {
  Matrix y(2, 5);
  y << 0, 1, 0, 1, 0,
       3, 3, 3, 3, 3;
  const RawVarParams raw = initial_var_params(y, 2);
  CHECK(raw.order() == 2);
  CHECK(raw.a_raw[0].isZero(0.0));
  const Matrix l = raw.lower();
  CHECK(l(0, 0) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  CHECK(l(1, 1) == 1.0);  // constant series falls back to unit scale
  CHECK(l(1, 0) == 0.0);
}

TEST_CASE("infinite precision stops after two updates") {
  TrainConfig c = small_config();
  c.prec = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  const FittedModel m = fit(ar1_series(0.5, 60, 1), c, [&](const IterationRecord&) { ++evaluations; });
  CHECK(m.iterations_used == 2);
  CHECK(evaluations == 3);
  CHECK(m.converged);
}

TEST_CASE("the iteration cap is reported") {
  TrainConfig c = small_config();
  c.prec = 1e-300;
  c.max_iters = 5;
  const FittedModel m = fit(ar1_series(0.5, 60, 2), c);
  CHECK(m.iterations_used == 5);
  CHECK_FALSE(m.converged);
  CHECK(std::isfinite(m.final_loglik));
}

TEST_CASE("every training iterate is causal") {
  TrainConfig c = small_config();
  c.eta2 = 0.3;  // large steps to push the raw parameters around
  c.prec = 1e-300;
  std::vector<double> radii;
  fit(ar1_series(0.95, 80, 3), c, [&](const IterationRecord& r) { radii.push_back(r.spectral_radius); });
  CHECK(radii.size() == 41);
  for (double r : radii) CHECK(r < 1.0);
}

TEST_CASE("fits are reproducible bit for bit") {
  const TrainConfig c = small_config();
  const Matrix y = ar1_series(0.3, 50, 4);
  const FittedModel a = fit(y, c);
  const FittedModel b = fit(y, c);
  CHECK(a.final_loglik == b.final_loglik);
  CHECK(a.trend.pack() == b.trend.pack());
  CHECK(a.raw_var.l_raw == b.raw_var.l_raw);
  CHECK(a.raw_var.a_raw == b.raw_var.a_raw);
}

TEST_CASE("a zero VAR learning rate freezes the VAR block") {
  TrainConfig c = small_config();
  c.eta2 = 0.0;
  const Matrix y = ar1_series(0.3, 50, 5);
  const RawVarParams start = initial_var_params(y, c.p);
  const FittedModel m = fit(y, c);
  CHECK(m.raw_var.a_raw == start.a_raw);
  CHECK(m.raw_var.l_raw == start.l_raw);
  // ... while the trend still moves.
  const RegressorSpec spec = regressor_spec(c, 50);
  const TrendNetParams pre = phase1_pretrain(y, regressor_matrix(spec, 1, 50), c, initial_trend_params(y, c));
  CHECK(m.trend.pack() != pre.pack());
}

TEST_CASE("fit refuses series no longer than the lag order") {
  TrainConfig c = small_config();
  c.p = 3;
  try {
    fit(Matrix::Random(2, 3), c);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
    CHECK(std::string(e.what()).find("T > p") != std::string::npos);
  }
}

TEST_CASE("the causal block of a fitted model matches its raw block") {
  const FittedModel m = fit(ar1_series(0.5, 40, 6), small_config());
  const CausalVarParams c = enforce_causality(m.raw_var);
  CHECK(c.sigma == m.causal.sigma);
  CHECK(c.a == m.causal.a);
  const Matrix mu = fitted_trend(m, 1, 40);
  CHECK(mu.cols() == 40);
  CHECK(fitted_trend(m, 41, 45).cols() == 5);
}

TEST_CASE("AR(1) coefficient recovery") {
  TrainConfig c;
  c.p = 1;
  c.units = 8;
  c.phase1_iters = 1000;
  c.max_iters = 3000;
  c.seed = 11;
  const FittedModel m = fit(ar1_series(0.6, 400, 77), c);
  CHECK(std::abs(m.causal.a[0](0, 0) - 0.6) < 0.15);
}

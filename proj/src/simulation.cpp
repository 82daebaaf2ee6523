// SPDX-License-Identifier: Apache-2.0
#include "trendvar/simulation.hpp"

#include <cmath>
#include <string>

#include "trendvar/errors.hpp"
#include "trendvar/io.hpp"
#include "trendvar/likelihood.hpp"
#include "trendvar/numerics.hpp"
#include "trendvar/parallel.hpp"

namespace trendvar {

Matrix synth_trend(Index m, Index T, std::uint64_t seed, const SynthTrendOptions& options) {
  if (m < 1 || T < 1) throw Error(ErrorKind::InvalidArgument, "synth_trend: need m >= 1, T >= 1");
  if (options.min_bumps < 0 || options.max_bumps < options.min_bumps) {
    throw Error(ErrorKind::InvalidArgument, "synth_trend: bad bump range");
  }
  Engine engine = make_engine(seed, streams::kSyntheticTrend);
  auto uniform = [&engine](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  };
  Matrix mu(m, T);
  for (Index k = 0; k < m; ++k) {
    const double offset = uniform(-options.offset_scale, options.offset_scale);
    const double slope = uniform(-options.drift_scale, options.drift_scale);
    const int bumps = std::uniform_int_distribution<int>(options.min_bumps, options.max_bumps)(engine);
    std::vector<double> height(bumps), center(bumps), width(bumps);
    for (int b = 0; b < bumps; ++b) {
      height[b] = uniform(-options.bump_scale, options.bump_scale);
      center[b] = uniform(0.05, 0.95);
      width[b] = uniform(options.min_width, options.max_width);
    }
    for (Index t = 0; t < T; ++t) {
      const double u = static_cast<double>(t + 1) / static_cast<double>(T);
      double v = offset + slope * u;
      for (int b = 0; b < bumps; ++b) {
        v += height[b] / (1.0 + std::exp(-(u - center[b]) / width[b]));
      }
      mu(k, t) = v;
    }
  }
  return mu;
}

Matrix resolve_trend(const TrendSource& source, Index m, Index T) {
  auto truncate = [m, T](const Matrix& mu, const std::string& what) -> Matrix {
    if (mu.rows() != m) {
      throw Error(ErrorKind::LengthMismatch, what + " has " + std::to_string(mu.rows()) +
                                                 " series but the model has " + std::to_string(m));
    }
    if (mu.cols() < T) {
      throw Error(ErrorKind::TrendLengthMismatch,
                  what + " has " + std::to_string(mu.cols()) + " time points, need " +
                      std::to_string(T));
    }
    return mu.leftCols(T);
  };
  if (std::holds_alternative<ZeroTrend>(source)) return Matrix::Zero(m, T);
  if (const auto* s = std::get_if<SyntheticTrend>(&source)) return synth_trend(m, T, s->seed, s->options);
  if (const auto* f = std::get_if<TrendFile>(&source)) {
    return truncate(read_trend_csv(f->path), "trend file " + f->path);
  }
  return truncate(std::get<GivenTrend>(source).mu, "given trend");
}

Matrix simulate_deviations(const CausalVarParams& causal, Index T, InitMode init, Index burn_in,
                           Engine& engine) {
  const Index m = causal.dim();
  const Index p = causal.order();
  if (T < p + 1) throw Error(ErrorKind::InvalidArgument, "simulate: need T >= p + 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Index n) {
    Vector z(n);
    for (Index i = 0; i < n; ++i) z(i) = normal(engine);
    return z;
  };
  const Matrix sigma_chol = cholesky_factor(causal.sigma);

  Index start = 0;
  Index total = T;
  Matrix dev;
  if (init == InitMode::Stationary) {
    dev = Matrix::Zero(m, total);
    const Matrix rp_chol = cholesky_factor(build_rp(causal, p));
    const Vector head = rp_chol * draw(m * p);
    for (Index j = 0; j < p; ++j) dev.col(j) = head.segment(j * m, m);
    start = p;
  } else {
    if (burn_in < 0) throw Error(ErrorKind::InvalidArgument, "simulate: burn-in must be >= 0");
    total = T + burn_in;
    dev = Matrix::Zero(m, total);
    start = p;  // zero pre-sample values
  }
  for (Index t = start; t < total; ++t) {
    Vector next = sigma_chol * draw(m);
    for (Index i = 1; i <= p; ++i) next += causal.a[i - 1] * dev.col(t - i);
    dev.col(t) = next;
  }
  return init == InitMode::Stationary ? dev : Matrix(dev.rightCols(T));
}

std::vector<Matrix> simulate(const SimSpec& spec) {
  if (spec.replications < 1) throw Error(ErrorKind::InvalidArgument, "simulate: replications >= 1");
  const Index m = spec.causal.dim();
  if (spec.length < spec.causal.order() + 1) {
    throw Error(ErrorKind::InvalidArgument, "simulate: need T >= p + 1");
  }
  const Matrix mu = resolve_trend(spec.trend, m, spec.length);
  std::vector<Matrix> out(static_cast<std::size_t>(spec.replications));
  parallel_for(out.size(), worker_count(), [&](std::size_t r) {
    Engine engine = make_engine(spec.seed, streams::kSimulationBase + r);
    out[r] = mu + simulate_deviations(spec.causal, spec.length, spec.init, spec.burn_in, engine);
  });
  return out;
}

double mad(const Matrix& estimated, const Matrix& truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols()) {
    throw Error(ErrorKind::LengthMismatch, "mad: trend shapes differ");
  }
  if (truth.size() == 0) throw Error(ErrorKind::LengthMismatch, "mad: empty trend");
  return (estimated - truth).cwiseAbs().sum() / static_cast<double>(truth.size());
}

CausalVarParams benchmark_var2_params() {
  CausalVarParams c;
  Matrix a1(3, 3);
  a1 << -1.0842, -0.1245, 0.3137,
        -0.7008, -0.3754, -0.2064,
         0.3166, 0.3251, 0.2135;
  Matrix a2(3, 3);
  a2 << -0.5449, -0.3052, -0.1952,
        -0.4057, 0.5129, 0.3655,
         0.0054, -0.2911, 0.2066;
  Matrix sigma(3, 3);
  sigma << 0.4834, -0.2707, 0.1368,
          -0.2707, 0.4079, -0.0221,
           0.1368, -0.0221, 0.4103;
  c.a = {a1, a2};
  c.sigma = sigma;
  return c;
}

}  // namespace trendvar

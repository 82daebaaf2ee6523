// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the unit tests: random draws and a central-difference
// gradient checker for taped scalar functions.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "trendvar/autodiff.hpp"
#include "trendvar/types.hpp"

namespace testing {

using trendvar::Index;
using trendvar::Matrix;
namespace ad = trendvar::ad;

inline Matrix uniform_matrix(std::mt19937_64& rng, Index rows, Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline Matrix random_spd(std::mt19937_64& rng, Index n) {
  const Matrix b = uniform_matrix(rng, n, n, -1.0, 1.0);
  return b * b.transpose() + 0.5 * Matrix::Identity(n, n);
}

using TapedScalar = std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>;

struct GradCheck {
  double worst = 0.0;  // largest scaled discrepancy seen
  Index entries = 0;
};

/// Compares reverse-mode gradients with central differences at `point`.
/// Discrepancy per entry is |g - fd| / max(|g|, |fd|, floor).
inline GradCheck check_gradient(const TapedScalar& f, const std::vector<Matrix>& point,
                                double step = 1e-6, double floor = 1e-3) {
  std::vector<Matrix> analytic;
  {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const Matrix& m : point) vars.push_back(tape.parameter(m));
    analytic = tape.gradient(f(tape, vars)).grads;
  }
  auto value_at = [&f](const std::vector<Matrix>& pt) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const Matrix& m : pt) vars.push_back(tape.constant(m));
    return f(tape, vars).scalar();
  };
  GradCheck out;
  std::vector<Matrix> pt = point;
  for (std::size_t k = 0; k < pt.size(); ++k) {
    for (Index i = 0; i < pt[k].size(); ++i) {
      const double saved = pt[k](i);
      pt[k](i) = saved + step;
      const double up = value_at(pt);
      pt[k](i) = saved - step;
      const double down = value_at(pt);
      pt[k](i) = saved;
      const double fd = (up - down) / (2.0 * step);
      const double g = analytic[k](i);
      const double scale = std::max({std::abs(g), std::abs(fd), floor});
      out.worst = std::max(out.worst, std::abs(g - fd) / scale);
      ++out.entries;
    }
  }
  return out;
}

/// Gamma(0..maxlag) from the truncated moving-average expansion
/// sum_j Psi_j Sigma Psi_{j+k}', an oracle independent of the Kronecker solve.
inline std::vector<Matrix> ma_autocovariances(const trendvar::CausalVarParams& c, Index maxlag,
                                              Index terms = 4000) {
  const Index m = c.dim();
  const Index p = c.order();
  std::vector<Matrix> psi{Matrix::Identity(m, m)};
  for (Index j = 1; j < terms + maxlag; ++j) {
    Matrix next = Matrix::Zero(m, m);
    for (Index i = 1; i <= std::min(p, j); ++i) next += c.a[i - 1] * psi[j - i];
    psi.push_back(next);
  }
  std::vector<Matrix> gamma;
  for (Index k = 0; k <= maxlag; ++k) {
    Matrix g = Matrix::Zero(m, m);
    for (Index j = 0; j < terms; ++j) g += psi[j + k] * c.sigma * psi[j].transpose();
    gamma.push_back(g);
  }
  return gamma;
}

}  // namespace testing

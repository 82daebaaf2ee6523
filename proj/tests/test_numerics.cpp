// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "support.hpp"
#include "trendvar/errors.hpp"
#include "trendvar/numerics.hpp"
#include "trendvar/simulation.hpp"

using namespace trendvar;
using testing::check_gradient;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
  CHECK(cholesky_factor(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3), 0.0));
}

TEST_CASE("cholesky 2x2 closed form") {
  const Matrix l = cholesky_factor(mat2(4, 2, 2, 3));
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l(0, 1) == 0.0);
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("cholesky reconstructs the benchmark innovation covariance") {
  const Matrix sigma = benchmark_var2_params().sigma;
  const Matrix l = cholesky_factor(sigma);
  CHECK((l * l.transpose() - sigma).norm() / sigma.norm() < 1e-12);
  CHECK(l.isLowerTriangular());
  CHECK((l.diagonal().array() > 0).all());
}

TEST_CASE("cholesky reconstruction holds for random SPD matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 6;
    const Matrix m = testing::random_spd(rng, n);
    const Matrix l = cholesky_factor(m);
    CHECK((l * l.transpose() - m).norm() / m.norm() < 1e-12);
  }
}

TEST_CASE("cholesky rejects indefinite and asymmetric input") {
  CHECK(kind_of([] { cholesky_factor(mat2(1, 2, 2, 1)); }) == ErrorKind::NotPositiveDefinite);
  CHECK(kind_of([] { cholesky_factor(mat2(1, 0.5, 0.0, 1)); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { cholesky_factor(-Matrix::Identity(2, 2)); }) == ErrorKind::NotPositiveDefinite);
}

TEST_CASE("cholesky recovers a singular PSD matrix through jitter") {
  const Matrix l = cholesky_factor(mat2(1, 1, 1, 1));
  CHECK((l * l.transpose() - mat2(1, 1, 1, 1)).norm() < 1e-4);
  CHECK(l.allFinite());
}

TEST_CASE("gradient of theta^2 at 3 is 6") {
  ad::Tape tape;
  ad::Var theta = tape.parameter(Matrix::Constant(1, 1, 3.0));
  const ad::GradientResult g = tape.gradient(ad::hadamard(theta, theta));
  CHECK(g.grads[0](0, 0) == 6.0);
  CHECK(g.disconnected.empty());
}

TEST_CASE("constant loss gives zero gradients and reports disconnected parameters") {
  ad::Tape tape;
  ad::Var a = tape.parameter(Matrix::Ones(2, 2));
  ad::Var b = tape.parameter(Matrix::Ones(3, 1));
  ad::Var loss = tape.constant(Matrix::Constant(1, 1, 5.0));
  const ad::GradientResult g = tape.gradient(loss);
  CHECK(g.grads[0].isZero(0.0));
  CHECK(g.grads[1].isZero(0.0));
  CHECK(g.disconnected.size() == 2);
  (void)a;
  (void)b;
}

TEST_CASE("log-determinant through cholesky matches finite differences") {
  auto logdet = [](ad::Tape&, const std::vector<ad::Var>& v) {
    ad::Var sym = ad::scale(ad::add(v[0], ad::transpose(v[0])), 0.5);
    return ad::scale(ad::sum_log_diag(ad::cholesky(sym)), 2.0);
  };
  const testing::GradCheck r = check_gradient(logdet, {mat2(4, 2, 2, 3)});
  CHECK(r.worst < 1e-5);
}

TEST_CASE("every primitive agrees with finite differences at random points") {
  std::mt19937_64 rng(5);
  using testing::uniform_matrix;
  const Matrix a = uniform_matrix(rng, 3, 3, -1, 1);
  const Matrix b = uniform_matrix(rng, 3, 2, -1, 1);
  const Matrix spd = testing::random_spd(rng, 3);
  const Matrix v = uniform_matrix(rng, 3, 1, -1, 1);
  const Matrix pos = uniform_matrix(rng, 3, 2, 0.5, 2.0);
  const Matrix z = uniform_matrix(rng, 8, 3, -2, 2);
  const Matrix packed = uniform_matrix(rng, 6, 1, 0.5, 1.5);

  struct Case {
    const char* name;
    testing::TapedScalar f;
    std::vector<Matrix> point;
  };
  const std::vector<Case> cases = {
      {"matmul/sub/add_scalar",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         return ad::sum_squares(ad::add_scalar(ad::sub(x[0] * x[1], x[1]), 0.3));
       },
       {a, b}},
      {"transpose/hadamard/scale",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         return ad::sum(ad::scale(ad::hadamard(ad::transpose(x[0]), x[0]), -1.7));
       },
       {a}},
      {"add_col/sigmoid/tanh/log",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         return ad::sum(ad::log(ad::add_scalar(ad::sigmoid(ad::add_col(x[0], x[1])), 1.0))) +
                ad::sum(ad::tanh(x[0]));
       },
       {pos, v}},
      {"lstm_activation",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         return ad::sum_squares(ad::lstm_activation(x[0], 2));
       },
       {z}},
      {"block/vcat/hcat/reshape/vec",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         ad::Var s = ad::vcat({ad::block(x[0], 0, 0, 2, 3), x[1].tape().constant(Matrix::Ones(1, 3))});
         ad::Var h = ad::hcat({s, x[0]});
         return ad::sum_squares(ad::vec(ad::reshape(h, 2, 9)));
       },
       {a, b}},
      {"fill_lower/kron",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         ad::Var l = ad::fill_lower(x[0], 3);
         return ad::sum_squares(ad::kron(l, ad::block(l, 0, 0, 2, 2)));
       },
       {packed}},
      {"cholesky",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         ad::Var l = ad::cholesky(ad::scale(ad::add(x[0], ad::transpose(x[0])), 0.5));
         return ad::sum(ad::hadamard(l, l)) + ad::sum_log_diag(l);
       },
       {spd}},
      {"solve_lower",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         ad::Var l = ad::cholesky(ad::scale(ad::add(x[0], ad::transpose(x[0])), 0.5));
         return ad::sum_squares(ad::solve_lower(l, x[1])) +
                ad::sum(ad::solve_lower(l, x[1], true));
       },
       {spd, b}},
      {"solve",
       [](ad::Tape&, const std::vector<ad::Var>& x) {
         ad::Var m = ad::add(x[0], x[0].tape().constant(3.0 * Matrix::Identity(3, 3)));
         return ad::sum_squares(ad::solve(m, x[1]));
       },
       {a, b}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    CHECK(check_gradient(c.f, c.point).worst < 1e-5);
  }
}

TEST_CASE("AR(1) autocovariances") {
  CausalVarParams c{{Matrix::Constant(1, 1, 0.5)}, Matrix::Identity(1, 1)};
  const auto g = stationary_autocovariances(c, 3);
  CHECK(g[0](0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(g[1](0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(g[3](0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("white noise autocovariances") {
  const Matrix sigma = benchmark_var2_params().sigma;
  CausalVarParams c{{Matrix::Zero(3, 3), Matrix::Zero(3, 3)}, sigma};
  const auto g = stationary_autocovariances(c, 4);
  CHECK((g[0] - sigma).cwiseAbs().maxCoeff() < 1e-14);
  for (int k = 1; k <= 4; ++k) CHECK(g[k].cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("benchmark autocovariances satisfy the Lyapunov and Yule-Walker identities") {
  const CausalVarParams c = benchmark_var2_params();
  ad::Tape tape;
  std::vector<ad::Var> a{tape.constant(c.a[0]), tape.constant(c.a[1])};
  const Matrix state = stationary_state_covariance(a, tape.constant(c.sigma)).value();
  const Matrix comp = companion_matrix(c.a);
  Matrix sigma_star = Matrix::Zero(6, 6);
  sigma_star.topLeftCorner(3, 3) = c.sigma;
  CHECK((comp * state * comp.transpose() + sigma_star - state).cwiseAbs().maxCoeff() < 1e-10);

  const auto g = stationary_autocovariances(c, 6);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g[0]);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK((g[0] - g[0].transpose()).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 1; k <= 6; ++k) {
    Matrix rhs = c.a[0] * g[k - 1];
    rhs += c.a[1] * (k >= 2 ? g[k - 2] : Matrix(g[1].transpose()));
    CHECK((g[k] - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
  // Independent route: the moving-average expansion.
  const auto oracle = testing::ma_autocovariances(c, 3);
  for (int k = 0; k <= 3; ++k) CHECK((g[k] - oracle[k]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("stationary covariance refuses unit roots") {
  CausalVarParams unit{{Matrix::Constant(1, 1, 1.0)}, Matrix::Identity(1, 1)};
  CHECK(kind_of([&] { stationary_autocovariances(unit, 1); }) == ErrorKind::NearUnitRoot);
  CausalVarParams near{{Matrix::Constant(1, 1, 1.0 - 1e-14)}, Matrix::Identity(1, 1)};
  CHECK(kind_of([&] { stationary_autocovariances(near, 1); }) == ErrorKind::NearUnitRoot);
}

TEST_CASE("companion spectral radius") {
  CHECK(companion_spectral_radius({Matrix::Constant(1, 1, 0.5)}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(companion_spectral_radius({Matrix::Constant(1, 1, 1.0)}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(companion_spectral_radius({Matrix::Constant(1, 1, -0.7)}) == doctest::Approx(0.7).epsilon(1e-14));

  // AR(2) against the roots of z^2 - a1 z - a2.
  const double a1 = 0.5, a2 = -0.8;
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 + 4 * a2));
  const double expected = std::max(std::abs((a1 + disc) / 2.0), std::abs((a1 - disc) / 2.0));
  CHECK(companion_spectral_radius({Matrix::Constant(1, 1, a1), Matrix::Constant(1, 1, a2)}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("benchmark spectral radius lies in (0, 1) and agrees with Gelfand's formula") {
  const CausalVarParams c = benchmark_var2_params();
  const double r = companion_spectral_radius(c.a);
  CHECK(r > 0.0);
  CHECK(r < 1.0);
  const Matrix comp = companion_matrix(c.a);
  Matrix power = Matrix::Identity(6, 6);
  const int k = 400;
  for (int i = 0; i < k; ++i) power = power * comp;
  CHECK(std::pow(power.norm(), 1.0 / k) == doctest::Approx(r).epsilon(2e-2));
}

TEST_CASE("spectral radius is invariant under relabelling the series") {
  std::mt19937_64 rng(3);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(3);
  perm.indices() << 2, 0, 1;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Matrix> a{testing::uniform_matrix(rng, 3, 3, -0.6, 0.6),
                          testing::uniform_matrix(rng, 3, 3, -0.4, 0.4)};
    std::vector<Matrix> b;
    for (const Matrix& ai : a) b.push_back(perm * ai * perm.transpose());
    CHECK(companion_spectral_radius(b) == doctest::Approx(companion_spectral_radius(a)).epsilon(1e-10));
  }
}

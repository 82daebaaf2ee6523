// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <vector>

namespace trendvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Reverse-mode automatic differentiation over dense matrices.
///
/// A Tape records matrix-valued primitive operations in execution order. Each
/// record keeps its output value and a pullback that maps the adjoint of the
/// output onto the adjoints of its inputs. Calling Tape::gradient sweeps the
/// records backwards once and returns d(loss)/d(parameter) for every
/// registered parameter.
///
/// A Tape is single-owner: do not record onto or sweep the same tape from two
/// threads. Distinct tapes are independent.
namespace ad {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

struct GradientResult {
  /// One entry per registered parameter, in registration order.
  std::vector<Matrix> grads;
  /// Registration indices of parameters the loss does not depend on. Their
  /// entry in `grads` is zero.
  std::vector<std::size_t> disconnected;
};

class Tape {
 public:
  /// Receives the adjoint of the node output and accumulates into inputs.
  using Pullback = std::function<void(Tape&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = delete;
  Tape& operator=(Tape&&) = delete;

  Var constant(Matrix value);
  Var parameter(Matrix value);
  Var record(Matrix value, std::initializer_list<Var> inputs, Pullback pullback);
  Var record(Matrix value, const std::vector<Var>& inputs, Pullback pullback);

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(const Var& v) const { return nodes_[v.id()].requires_grad; }

  /// Adds `adjoint` into the adjoint of `v`. No-op for constants.
  void accumulate(const Var& v, const Matrix& adjoint);
  /// Adds `adjoint` into the (row, col) block of the adjoint of `v`.
  void accumulate_block(const Var& v, Index row, Index col, const Matrix& adjoint);

  /// Reverse sweep from a finite 1x1 `loss`.
  GradientResult gradient(const Var& loss);

  const std::vector<Var>& parameters() const { return parameters_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix adjoint;
    Pullback pullback;
    bool requires_grad = false;
  };

  Var push(Matrix value, bool requires_grad, Pullback pullback);

  std::deque<Node> nodes_;
  std::vector<Var> parameters_;
};

// Elementwise and linear primitives.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var hadamard(const Var& a, const Var& b);
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
/// a + v * 1', broadcasting the column vector v over the columns of a.
Var add_col(const Var& a, const Var& v);

Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var log(const Var& a);
/// Logistic sigmoid on rows [0, 3u) and tanh on rows [3u, 4u) of a 4u-row
/// gate pre-activation.
Var lstm_activation(const Var& z, Index units);

// Reductions.
Var sum(const Var& a);
Var sum_squares(const Var& a);
/// sum_i log(a_ii); requires a positive diagonal.
Var sum_log_diag(const Var& a);

// Structure.
Var block(const Var& a, Index row, Index col, Index rows, Index cols);
Var vcat(const std::vector<Var>& parts);
Var hcat(const std::vector<Var>& parts);
/// Column-major reshape; vec(a) is reshape(a, rows*cols, 1).
Var reshape(const Var& a, Index rows, Index cols);
Var vec(const Var& a);
/// Fills the lower triangle of a dim x dim matrix row by row from a
/// dim(dim+1)/2 column vector.
Var fill_lower(const Var& v, Index dim);
Var kron(const Var& a, const Var& b);

// Factorizations and solves.
/// Lower Cholesky factor of the symmetric part of `a`, with diagonal jitter
/// on pivot failure (see cholesky_factor).
Var cholesky(const Var& a);
/// Solves l * x = b (or l' * x = b when `transpose_l`) using the lower
/// triangle of l.
Var solve_lower(const Var& l, const Var& b, bool transpose_l = false);
/// Solves a * x = b with partial-pivot LU. When `condition` is non-null it
/// receives the reciprocal of the LU reciprocal-condition estimate.
Var solve(const Var& a, const Var& b, double* condition = nullptr);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return matmul(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }

}  // namespace ad
}  // namespace trendvar

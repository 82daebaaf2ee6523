// SPDX-License-Identifier: Apache-2.0
#include "trendvar/autodiff.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "trendvar/errors.hpp"
#include "trendvar/numerics.hpp"

namespace trendvar::ad {

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw Error(ErrorKind::InvalidArgument, "scalar() on a non-1x1 node");
  }
  return v(0, 0);
}

Var Tape::push(Matrix value, bool requires_grad, Pullback pullback) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.pullback = std::move(pullback);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::parameter(Matrix value) {
  Var v = push(std::move(value), true, nullptr);
  parameters_.push_back(v);
  return v;
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, Pullback pullback) {
  bool needs = false;
  for (const Var& in : inputs) needs = needs || nodes_[in.id()].requires_grad;
  return push(std::move(value), needs, std::move(pullback));
}

Var Tape::record(Matrix value, const std::vector<Var>& inputs, Pullback pullback) {
  bool needs = false;
  for (const Var& in : inputs) needs = needs || nodes_[in.id()].requires_grad;
  return push(std::move(value), needs, std::move(pullback));
}

void Tape::accumulate(const Var& v, const Matrix& adjoint) {
  Node& node = nodes_[v.id()];
  if (!node.requires_grad) return;
  if (node.adjoint.size() == 0) {
    node.adjoint = adjoint;
  } else {
    node.adjoint += adjoint;
  }
}

void Tape::accumulate_block(const Var& v, Index row, Index col, const Matrix& adjoint) {
  Node& node = nodes_[v.id()];
  if (!node.requires_grad) return;
  if (node.adjoint.size() == 0) node.adjoint = Matrix::Zero(node.value.rows(), node.value.cols());
  node.adjoint.block(row, col, adjoint.rows(), adjoint.cols()) += adjoint;
}

GradientResult Tape::gradient(const Var& loss) {
  if (loss.tape_ != this) {
    throw Error(ErrorKind::InvalidArgument, "loss belongs to a different tape");
  }
  const Matrix& lv = nodes_[loss.id()].value;
  if (lv.rows() != 1 || lv.cols() != 1 || !std::isfinite(lv(0, 0))) {
    throw Error(ErrorKind::InvalidArgument, "gradient requires a finite 1x1 loss");
  }
  for (Node& node : nodes_) node.adjoint.resize(0, 0);

  if (nodes_[loss.id()].requires_grad) {
    nodes_[loss.id()].adjoint = Matrix::Ones(1, 1);
    for (std::size_t id = loss.id() + 1; id-- > 0;) {
      Node& node = nodes_[id];
      if (node.adjoint.size() == 0 || !node.pullback) continue;
      node.pullback(*this, node.adjoint);
    }
  }

  GradientResult result;
  result.grads.reserve(parameters_.size());
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    const Node& node = nodes_[parameters_[k].id()];
    if (node.adjoint.size() == 0) {
      result.grads.push_back(Matrix::Zero(node.value.rows(), node.value.cols()));
      result.disconnected.push_back(k);
    } else {
      result.grads.push_back(node.adjoint);
    }
  }
  return result;
}

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix lower_part(const Matrix& m) { return m.triangularView<Eigen::Lower>(); }

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  return a.tape().record(a.value() + b.value(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  return a.tape().record(a.value() - b.value(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var scale(const Var& a, double s) {
  return a.tape().record(s * a.value(), {a},
                         [a, s](Tape& t, const Matrix& g) { t.accumulate(a, s * g); });
}

Var add_scalar(const Var& a, double s) {
  Matrix out = a.value().array() + s;
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) { t.accumulate(a, g); });
}

Var hadamard(const Var& a, const Var& b) {
  require_same_shape(a, b, "hadamard");
  return a.tape().record(a.value().cwiseProduct(b.value()), {a, b},
                         [a, b](Tape& t, const Matrix& g) {
                           t.accumulate(a, g.cwiseProduct(b.value()));
                           t.accumulate(b, g.cwiseProduct(a.value()));
                         });
}

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::InvalidArgument,
                "matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                    std::to_string(b.rows()) + " differ");
  }
  Matrix out = a.value() * b.value();
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
    if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
  });
}

Var transpose(const Var& a) {
  return a.tape().record(a.value().transpose(), {a},
                         [a](Tape& t, const Matrix& g) { t.accumulate(a, g.transpose()); });
}

Var add_col(const Var& a, const Var& v) {
  if (v.cols() != 1 || v.rows() != a.rows()) {
    throw Error(ErrorKind::InvalidArgument, "add_col: v must be a column matching a's rows");
  }
  Matrix out = a.value().colwise() + v.value().col(0);
  return a.tape().record(std::move(out), {a, v}, [a, v](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (t.requires_grad(v)) t.accumulate(v, g.rowwise().sum());
  });
}

Var sigmoid(const Var& a) {
  Matrix out = a.value().unaryExpr([](double x) { return logistic(x); });
  Tape& tape = a.tape();
  const std::size_t out_id = tape.size();
  return tape.record(std::move(out), {a}, [a, out_id](Tape& t, const Matrix& g) {
    const Matrix& s = t.value(out_id);
    t.accumulate(a, g.array() * s.array() * (1.0 - s.array()));
  });
}

Var tanh(const Var& a) {
  Matrix out = a.value().array().tanh();
  Tape& tape = a.tape();
  const std::size_t out_id = tape.size();
  return tape.record(std::move(out), {a}, [a, out_id](Tape& t, const Matrix& g) {
    const Matrix& y = t.value(out_id);
    t.accumulate(a, g.array() * (1.0 - y.array().square()));
  });
}

Var log(const Var& a) {
  Matrix out = a.value().array().log();
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a, g.array() / a.value().array());
  });
}

Var lstm_activation(const Var& z, Index units) {
  if (z.rows() != 4 * units) {
    throw Error(ErrorKind::InvalidArgument, "lstm_activation: expected 4*units rows");
  }
  const Matrix& zv = z.value();
  Matrix out(zv.rows(), zv.cols());
  out.topRows(3 * units) = zv.topRows(3 * units).unaryExpr([](double x) { return logistic(x); });
  out.bottomRows(units) = zv.bottomRows(units).array().tanh();
  Tape& tape = z.tape();
  const std::size_t out_id = tape.size();
  return tape.record(std::move(out), {z}, [z, units, out_id](Tape& t, const Matrix& g) {
    const Matrix& y = t.value(out_id);
    Matrix dz(y.rows(), y.cols());
    dz.topRows(3 * units) = g.topRows(3 * units).array() * y.topRows(3 * units).array() *
                            (1.0 - y.topRows(3 * units).array());
    dz.bottomRows(units) =
        g.bottomRows(units).array() * (1.0 - y.bottomRows(units).array().square());
    t.accumulate(z, dz);
  });
}

Var sum(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var sum_squares(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().squaredNorm();
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a, (2.0 * g(0, 0)) * a.value());
  });
}

Var sum_log_diag(const Var& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "sum_log_diag: not square");
  Matrix out(1, 1);
  out(0, 0) = a.value().diagonal().array().log().sum();
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix d = Matrix::Zero(a.rows(), a.cols());
    d.diagonal() = g(0, 0) * a.value().diagonal().cwiseInverse();
    t.accumulate(a, d);
  });
}

Var block(const Var& a, Index row, Index col, Index rows, Index cols) {
  if (row < 0 || col < 0 || row + rows > a.rows() || col + cols > a.cols()) {
    throw Error(ErrorKind::InvalidArgument, "block: out of range");
  }
  Matrix out = a.value().block(row, col, rows, cols);
  return a.tape().record(std::move(out), {a}, [a, row, col](Tape& t, const Matrix& g) {
    t.accumulate_block(a, row, col, g);
  });
}

Var vcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "vcat: no parts");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw Error(ErrorKind::InvalidArgument, "vcat: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return parts.front().tape().record(std::move(out), parts, [parts](Tape& t, const Matrix& g) {
    Index r0 = 0;
    for (const Var& p : parts) {
      if (t.requires_grad(p)) t.accumulate(p, g.middleRows(r0, p.rows()));
      r0 += p.rows();
    }
  });
}

Var hcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "hcat: no parts");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw Error(ErrorKind::InvalidArgument, "hcat: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return parts.front().tape().record(std::move(out), parts, [parts](Tape& t, const Matrix& g) {
    Index c0 = 0;
    for (const Var& p : parts) {
      if (t.requires_grad(p)) t.accumulate(p, g.middleCols(c0, p.cols()));
      c0 += p.cols();
    }
  });
}

Var reshape(const Var& a, Index rows, Index cols) {
  if (rows * cols != a.value().size()) {
    throw Error(ErrorKind::InvalidArgument, "reshape: size mismatch");
  }
  Matrix out = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    t.accumulate(a, Eigen::Map<const Matrix>(g.data(), a.rows(), a.cols()));
  });
}

Var vec(const Var& a) { return reshape(a, a.value().size(), 1); }

Var fill_lower(const Var& v, Index dim) {
  if (v.cols() != 1 || v.rows() != dim * (dim + 1) / 2) {
    throw Error(ErrorKind::InvalidArgument, "fill_lower: expected dim(dim+1)/2 column");
  }
  Matrix out = Matrix::Zero(dim, dim);
  Index k = 0;
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j <= i; ++j) out(i, j) = v.value()(k++, 0);
  }
  return v.tape().record(std::move(out), {v}, [v, dim](Tape& t, const Matrix& g) {
    Matrix gv(v.rows(), 1);
    Index k0 = 0;
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j <= i; ++j) gv(k0++, 0) = g(i, j);
    }
    t.accumulate(v, gv);
  });
}

Var kron(const Var& a, const Var& b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Index br = bv.rows();
  const Index bc = bv.cols();
  Matrix out(av.rows() * br, av.cols() * bc);
  for (Index i = 0; i < av.rows(); ++i) {
    for (Index j = 0; j < av.cols(); ++j) out.block(i * br, j * bc, br, bc) = av(i, j) * bv;
  }
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    const Matrix& av2 = a.value();
    const Matrix& bv2 = b.value();
    const Index r = bv2.rows();
    const Index c = bv2.cols();
    Matrix ga = Matrix::Zero(av2.rows(), av2.cols());
    Matrix gb = Matrix::Zero(r, c);
    for (Index i = 0; i < av2.rows(); ++i) {
      for (Index j = 0; j < av2.cols(); ++j) {
        const auto gblock = g.block(i * r, j * c, r, c);
        ga(i, j) = gblock.cwiseProduct(bv2).sum();
        gb += av2(i, j) * gblock;
      }
    }
    t.accumulate(a, ga);
    t.accumulate(b, gb);
  });
}

Var cholesky(const Var& a) {
  Matrix l = cholesky_factor(a.value());
  Tape& tape = a.tape();
  const std::size_t out_id = tape.size();
  return tape.record(std::move(l), {a}, [a, out_id](Tape& t, const Matrix& g) {
    // Reverse rule for symmetric input: S = L^-T Phi(L' Lbar) L^-1, with Phi
    // taking the lower triangle and halving the diagonal; grad = sym(S).
    const Matrix& lv = t.value(out_id);
    Matrix phi = lower_part(lv.transpose() * lower_part(g));
    phi.diagonal() *= 0.5;
    const auto tri = lv.triangularView<Eigen::Lower>();
    // X = L^-T phi, then S' = L^-T X' i.e. S = X L^-1.
    Matrix x = tri.transpose().solve(phi);
    Matrix s = tri.transpose().solve(Matrix(x.transpose())).transpose();
    t.accumulate(a, 0.5 * (s + s.transpose()));
  });
}

Var solve_lower(const Var& l, const Var& b, bool transpose_l) {
  if (l.rows() != l.cols() || l.rows() != b.rows()) {
    throw Error(ErrorKind::InvalidArgument, "solve_lower: shape mismatch");
  }
  const auto tri = l.value().triangularView<Eigen::Lower>();
  Matrix x = transpose_l ? Matrix(tri.transpose().solve(b.value())) : Matrix(tri.solve(b.value()));
  if (!x.allFinite()) {
    throw Error(ErrorKind::SingularScale, "solve_lower: singular triangular factor");
  }
  Tape& tape = l.tape();
  const std::size_t out_id = tape.size();
  return tape.record(std::move(x), {l, b}, [l, b, transpose_l, out_id](Tape& t, const Matrix& g) {
    const Matrix& xv = t.value(out_id);
    const auto tri2 = l.value().triangularView<Eigen::Lower>();
    if (!transpose_l) {
      Matrix gb = tri2.transpose().solve(g);
      if (t.requires_grad(l)) t.accumulate(l, -lower_part(gb * xv.transpose()));
      t.accumulate(b, gb);
    } else {
      Matrix gb = tri2.solve(g);
      if (t.requires_grad(l)) t.accumulate(l, -lower_part(xv * gb.transpose()));
      t.accumulate(b, gb);
    }
  });
}

Var solve(const Var& a, const Var& b, double* condition) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw Error(ErrorKind::InvalidArgument, "solve: shape mismatch");
  }
  auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(a.value());
  const double rcond = lu->rcond();
  if (condition != nullptr) *condition = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  Matrix x = lu->solve(b.value());
  Tape& tape = a.tape();
  const std::size_t out_id = tape.size();
  return tape.record(std::move(x), {a, b}, [a, b, lu, out_id](Tape& t, const Matrix& g) {
    Matrix gb = lu->transpose().solve(g);
    if (t.requires_grad(a)) t.accumulate(a, -gb * t.value(out_id).transpose());
    t.accumulate(b, gb);
  });
}

}  // namespace trendvar::ad

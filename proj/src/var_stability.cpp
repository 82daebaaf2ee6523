// SPDX-License-Identifier: Apache-2.0
#include "trendvar/var_stability.hpp"

#include <cmath>

#include "trendvar/errors.hpp"

namespace trendvar {

Index RawVarParams::dim() const {
  // l_raw holds m(m+1)/2 entries.
  const double n = static_cast<double>(l_raw.size());
  return static_cast<Index>(std::llround((std::sqrt(8.0 * n + 1.0) - 1.0) / 2.0));
}

Matrix RawVarParams::lower() const {
  const Index m = dim();
  if (m * (m + 1) / 2 != l_raw.size()) {
    throw Error(ErrorKind::InvalidArgument, "raw VAR: l_raw size is not triangular");
  }
  Matrix l = Matrix::Zero(m, m);
  Index k = 0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j <= i; ++j) l(i, j) = l_raw(k++);
  }
  return l;
}

Vector RawVarParams::pack_lower(const Matrix& l) {
  const Index m = l.rows();
  Vector v(m * (m + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j <= i; ++j) v(k++) = l(i, j);
  }
  return v;
}

RawVarParams RawVarParams::initial(Index order, const Vector& l_diagonal) {
  const Index m = l_diagonal.size();
  RawVarParams raw;
  raw.a_raw.assign(static_cast<std::size_t>(order), Matrix::Zero(m, m));
  raw.l_raw = pack_lower(Matrix(l_diagonal.asDiagonal()));
  return raw;
}

namespace {

// x * l^{-1} for lower-triangular l, as (l^{-T} x')'.
ad::Var solve_right_lower(const ad::Var& x, const ad::Var& l) {
  return ad::transpose(ad::solve_lower(l, ad::transpose(x), /*transpose_l=*/true));
}

void check_scale(const Matrix& l) {
  if (l.rows() != l.cols()) throw Error(ErrorKind::InvalidArgument, "L must be square");
  const Vector d = l.diagonal().cwiseAbs();
  const double largest = std::max(1.0, d.maxCoeff());
  if (!(d.minCoeff() > 1e-12 * largest)) {
    throw Error(ErrorKind::SingularScale, "L has a (near-)zero diagonal entry");
  }
}

}  // namespace

std::vector<ad::Var> to_pacf(const std::vector<ad::Var>& a_raw) {
  std::vector<ad::Var> out;
  out.reserve(a_raw.size());
  for (const ad::Var& a : a_raw) {
    ad::Tape& tape = a.tape();
    ad::Var gram = ad::add(tape.constant(Matrix::Identity(a.rows(), a.rows())),
                           ad::matmul(a, ad::transpose(a)));
    ad::Var b = ad::cholesky(gram);
    out.push_back(ad::solve_lower(b, a));
  }
  return out;
}

CausalVars pacf_to_causal(const std::vector<ad::Var>& pacf, const ad::Var& l) {
  if (pacf.empty()) throw Error(ErrorKind::InvalidArgument, "pacf_to_causal: need p >= 1");
  check_scale(l.value());
  ad::Tape& tape = l.tape();
  const Index m = l.rows();
  const std::size_t p = pacf.size();

  ad::Var identity = tape.constant(Matrix::Identity(m, m));
  ad::Var sigma_fwd = identity;
  ad::Var sigma_bwd = identity;
  ad::Var chol_fwd = identity;
  ad::Var chol_bwd = identity;
  std::vector<ad::Var> fwd;  // A_{s,1..s}
  std::vector<ad::Var> bwd;  // A*_{s,1..s}

  for (std::size_t s = 0; s < p; ++s) {
    const ad::Var& ps = pacf[s];
    if (ps.rows() != m || ps.cols() != m) {
      throw Error(ErrorKind::InvalidArgument, "pacf_to_causal: P_j must be m x m");
    }
    ad::Var lead_fwd = solve_right_lower(ad::matmul(chol_fwd, ps), chol_bwd);
    ad::Var lead_bwd = solve_right_lower(ad::matmul(chol_bwd, ad::transpose(ps)), chol_fwd);

    std::vector<ad::Var> next_fwd;
    std::vector<ad::Var> next_bwd;
    next_fwd.reserve(s + 1);
    next_bwd.reserve(s + 1);
    for (std::size_t i = 0; i < s; ++i) {
      next_fwd.push_back(ad::sub(fwd[i], ad::matmul(lead_fwd, bwd[s - 1 - i])));
      next_bwd.push_back(ad::sub(bwd[i], ad::matmul(lead_bwd, fwd[s - 1 - i])));
    }
    next_fwd.push_back(lead_fwd);
    next_bwd.push_back(lead_bwd);

    ad::Var next_sigma_fwd =
        ad::sub(sigma_fwd, ad::matmul(ad::matmul(lead_fwd, sigma_bwd), ad::transpose(lead_fwd)));
    ad::Var next_sigma_bwd =
        ad::sub(sigma_bwd, ad::matmul(ad::matmul(lead_bwd, sigma_fwd), ad::transpose(lead_bwd)));
    sigma_fwd = next_sigma_fwd;
    sigma_bwd = next_sigma_bwd;
    chol_fwd = ad::cholesky(sigma_fwd);
    if (s + 1 < p) chol_bwd = ad::cholesky(sigma_bwd);
    fwd = std::move(next_fwd);
    bwd = std::move(next_bwd);
  }

  // A_i = (L L_p^{-1}) A_{p,i} (L L_p^{-1})^{-1} = L (L_p^{-1} A_{p,i} L_p) L^{-1}.
  CausalVars out;
  out.a.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    ad::Var inner = ad::solve_lower(chol_fwd, ad::matmul(fwd[i], chol_fwd));
    out.a.push_back(solve_right_lower(ad::matmul(l, inner), l));
  }
  out.sigma = ad::matmul(l, ad::transpose(l));
  return out;
}

PacfSequence to_pacf(const std::vector<Matrix>& a_raw) {
  ad::Tape tape;
  std::vector<ad::Var> a;
  a.reserve(a_raw.size());
  for (const Matrix& ai : a_raw) {
    if (!ai.allFinite()) throw Error(ErrorKind::InvalidArgument, "to_pacf: non-finite entries");
    a.push_back(tape.constant(ai));
  }
  PacfSequence out;
  for (const ad::Var& pj : to_pacf(a)) out.p_mats.push_back(pj.value());
  return out;
}

CausalVarParams pacf_to_causal(const PacfSequence& pacf, const Matrix& l) {
  ad::Tape tape;
  std::vector<ad::Var> p;
  p.reserve(pacf.p_mats.size());
  for (const Matrix& pj : pacf.p_mats) p.push_back(tape.constant(pj));
  Matrix lower = l.triangularView<Eigen::Lower>();
  CausalVars vars = pacf_to_causal(p, tape.constant(std::move(lower)));
  CausalVarParams out;
  for (const ad::Var& ai : vars.a) out.a.push_back(ai.value());
  out.sigma = vars.sigma.value();
  return out;
}

CausalVarParams enforce_causality(const RawVarParams& raw) {
  if (raw.a_raw.empty()) throw Error(ErrorKind::InvalidArgument, "enforce_causality: p >= 1");
  return pacf_to_causal(to_pacf(raw.a_raw), raw.lower());
}

}  // namespace trendvar

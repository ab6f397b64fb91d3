// Copyright 2026 The shotcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "shotcost/common.hpp"

namespace shotcost {

/// (F + eta Id)^-1 together with its singular values (descending).
struct RegularizedInverse {
  Matrix matrix;
  double eta = 0.0;
  Vector singular_values;

  Eigen::Index dimension() const { return matrix.rows(); }
  double sigma_max() const { return singular_values[0]; }
  double sigma_min() const { return singular_values[singular_values.size() - 1]; }
};

/// Outcome of the singular-value bounds 1/(nu r_g^2 + eta) <= sigma <= 1/eta.
struct SpectralBoundCheck {
  double upper = 0.0;  // 1/eta (infinite for eta = 0)
  double lower = 0.0;  // 1/(nu + eta)
  bool upper_ok = true;
  bool lower_ok = true;
  bool ok() const { return upper_ok && lower_ok; }
};

inline SpectralBoundCheck check_spectral_bounds(const RegularizedInverse& inv, double rg = 1.0) {
  constexpr double kRelTol = 1e-9;
  SpectralBoundCheck c;
  const double nu = static_cast<double>(inv.dimension());
  c.upper = inv.eta > 0.0 ? 1.0 / inv.eta : std::numeric_limits<double>::infinity();
  c.lower = 1.0 / (nu * rg * rg + inv.eta);
  c.upper_ok = inv.sigma_max() <= c.upper * (1.0 + kRelTol);
  c.lower_ok = inv.sigma_min() >= c.lower * (1.0 - kRelTol);
  return c;
}

/// Inverse of f + eta Id via symmetric eigendecomposition. Throws for an
/// asymmetric f, a negative eta, or a singular shifted matrix.
inline RegularizedInverse regularized_inverse(const Matrix& f, double eta) {
  if (f.rows() != f.cols() || f.rows() == 0) throw DimensionError("regularized_inverse needs a square matrix");
  if (!(eta >= 0.0)) throw InvariantError("regularization eta must be >= 0");
  if (!f.allFinite()) throw InvariantError("matrix has non-finite entries");
  const double asym = (f - f.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) throw InvariantError("matrix is not symmetric (max |F - F^T| = " + std::to_string(asym) + ")");

  const Matrix sym = 0.5 * (f + f.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector shifted = eig.eigenvalues().array() + eta;
  constexpr double kSingular = 1e-12;
  if (shifted.cwiseAbs().minCoeff() <= kSingular) {
    throw SingularityError("F + eta Id is singular (smallest |eigenvalue| " +
                           std::to_string(shifted.cwiseAbs().minCoeff()) + ")");
  }
  RegularizedInverse out;
  out.eta = eta;
  const Matrix& v = eig.eigenvectors();
  out.matrix = v * shifted.cwiseInverse().asDiagonal() * v.transpose();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  Vector sv = shifted.cwiseAbs().cwiseInverse();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  out.singular_values = std::move(sv);
  return out;
}

/// Average squared singular value ||m||_F^2 / d.
inline double spc(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionError("spc needs a square matrix");
  return m.squaredNorm() / static_cast<double>(m.rows());
}

/// sigma_max / sigma_min (infinite for a singular matrix).
inline double cnd(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionError("cnd needs a square matrix");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double lo = s[s.size() - 1];
  return lo > 0.0 ? s[0] / lo : std::numeric_limits<double>::infinity();
}

/// First-order error-propagation coefficients for v = Finv g:
///   eps^2 = sum_kl a_kl Var{F_kl} + sum_k b_k Var[g_k],
///   a_kl = (sum_i Finv_ik^2) v_l^2,  b_k = sum_l Finv_kl^2.
/// a_sym folds each symmetric pair onto its lower-triangle slot for the case
/// where (k,l) and (l,k) are one shared measurement:
///   a_sym_kl = a_kl + a_lk + 2 v_k v_l (Finv^T Finv)_kl  for k > l,
///   a_sym_kk = a_kk, and zero above the diagonal.
struct PropagationCoefficients {
  Matrix a;
  Vector b;
  Matrix a_sym;
  Vector v;
};

inline PropagationCoefficients propagation_coefficients(const RegularizedInverse& inv, const Vector& g) {
  const Matrix& fi = inv.matrix;
  const Eigen::Index nu = fi.rows();
  if (g.size() != nu) throw DimensionError("gradient / inverse size mismatch");
  PropagationCoefficients pc;
  pc.v = fi * g;
  const Vector col_sq = fi.array().square().colwise().sum().transpose();
  pc.b = col_sq;
  const Vector v_sq = pc.v.array().square();
  pc.a = col_sq * v_sq.transpose();
  const Matrix gram = fi.transpose() * fi;
  pc.a_sym = Matrix::Zero(nu, nu);
  for (Eigen::Index k = 0; k < nu; ++k) {
    pc.a_sym(k, k) = pc.a(k, k);
    for (Eigen::Index l = 0; l < k; ++l) {
      const double folded = pc.a(k, l) + pc.a(l, k) + 2.0 * pc.v[k] * pc.v[l] * gram(k, l);
      pc.a_sym(k, l) = std::max(0.0, folded);
    }
  }
  return pc;
}

namespace detail {
inline double weighted_inverse_shots(double coefficient, double variance, double shots,
                                     const char* what) {
  if (coefficient <= 0.0 || variance <= kZeroVariance) return 0.0;
  const double weight = coefficient * variance;
  if (shots <= 0.0) throw PlanError(std::string("zero shots assigned to a ") + what + " entry with nonzero error weight");
  return weight / shots;
}
}  // namespace detail

/// Predicted eps^2 from single-shot variances (one shot per entry).
inline double predicted_epsilon2(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                 const Vector& var_grad) {
  if (var_fisher.rows() != pc.a.rows() || var_fisher.cols() != pc.a.cols() || var_grad.size() != pc.b.size()) {
    throw DimensionError("variance / coefficient shape mismatch");
  }
  return (pc.a.array() * var_fisher.array()).sum() + pc.b.dot(var_grad);
}

/// Predicted eps^2 when entry (k,l) receives fisher_shots(k,l) measurements
/// and g_k receives grad_shots[k]. With `symmetric`, only the lower triangle
/// of fisher_shots is read and the folded coefficients are used.
inline double predicted_epsilon2(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                 const Vector& var_grad, const Matrix& fisher_shots,
                                 const Vector& grad_shots, bool symmetric) {
  const Eigen::Index nu = pc.a.rows();
  if (var_fisher.rows() != nu || var_fisher.cols() != nu || var_grad.size() != nu ||
      fisher_shots.rows() != nu || fisher_shots.cols() != nu || grad_shots.size() != nu) {
    throw DimensionError("plan / variance shape mismatch");
  }
  const Matrix& a = symmetric ? pc.a_sym : pc.a;
  double eps2 = 0.0;
  for (Eigen::Index k = 0; k < nu; ++k) {
    for (Eigen::Index l = 0; l < nu; ++l) {
      if (symmetric && l > k) continue;
      eps2 += detail::weighted_inverse_shots(a(k, l), var_fisher(k, l), fisher_shots(k, l), "Fisher");
    }
    eps2 += detail::weighted_inverse_shots(pc.b[k], var_grad[k], grad_shots[k], "gradient");
  }
  return eps2;
}

}  // namespace shotcost

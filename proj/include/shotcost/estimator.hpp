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
#include <string>
#include <string_view>
#include <vector>

#include "shotcost/ansatz.hpp"
#include "shotcost/common.hpp"
#include "shotcost/pauli.hpp"
#include "shotcost/statevector.hpp"

namespace shotcost {

enum class FisherProtocol { pure_abc, swap_test };

inline std::string to_string(FisherProtocol p) {
  return p == FisherProtocol::pure_abc ? "pure_abc" : "swap_test";
}

inline FisherProtocol parse_fisher_protocol(std::string_view name) {
  if (name == "pure_abc") return FisherProtocol::pure_abc;
  if (name == "swap_test") return FisherProtocol::swap_test;
  throw ConfigError("unknown fisher protocol \"" + std::string(name) +
                    "\" (expected pure_abc or swap_test)");
}

/// Hadamard-test overlaps that make up the Fisher matrix:
///   A_kl = Re<0|D_k^dag D_l|0>, B_k + i C_k = <0|D_k^dag U_c|0>,
///   F_kl = A_kl - B_k B_l - C_k C_l.
struct FisherComponents {
  Matrix a;
  Vector b;
  Vector c;
  Matrix fisher;
};

/// Exact values and single-shot variances of every measured object at one
/// parameter point. The underlying overlaps are kept so that shot noise can
/// be simulated on the same probabilities.
struct MetricEstimate {
  Matrix fisher;
  Vector grad;
  Matrix var_fisher;
  Vector var_grad;
  FisherProtocol protocol = FisherProtocol::pure_abc;

  FisherComponents components;
  Matrix gradient_elements;  // M, nu x r_h
  Vector hamiltonian_coefficients;
  double energy = 0.0;

  int parameter_count() const { return static_cast<int>(grad.size()); }
};

/// M_kl = Im<0|D_k^dag P_l U_c|0>, from precomputed D_k|0> and |psi>.
inline Matrix gradient_matrix_elements(const std::vector<StateVector>& derivatives,
                                       const StateVector& psi, const PauliSum& h,
                                       int workers = 1) {
  if (h.qubit_count() != psi.qubit_count()) throw DimensionError("Hamiltonian / circuit qubit mismatch");
  const auto nu = static_cast<Eigen::Index>(derivatives.size());
  const auto rh = static_cast<Eigen::Index>(h.size());
  std::vector<StateVector> p_psi(static_cast<std::size_t>(rh), psi);
  for (Eigen::Index l = 0; l < rh; ++l) p_psi[static_cast<std::size_t>(l)].apply(h[static_cast<std::size_t>(l)].string);
  Matrix m(nu, rh);
  parallel_for(static_cast<std::size_t>(nu), workers, [&](std::size_t k) {
    for (Eigen::Index l = 0; l < rh; ++l) {
      m(static_cast<Eigen::Index>(k), l) = inner(derivatives[k], p_psi[static_cast<std::size_t>(l)]).imag();
    }
  });
  return m;
}

inline Matrix gradient_matrix_elements(const AnsatzCircuit& c, const Vector& theta,
                                       const PauliSum& h) {
  return gradient_matrix_elements(derivative_states(c, theta), prepare_state(c, theta), h);
}

/// g_k = -sum_l h_l M_kl and the single-shot variance
/// Var[g_k] = sum_l h_l^2 (1 - M_kl^2) of the per-term Hadamard-test protocol.
inline std::pair<Vector, Vector> gradient_with_variance(const Matrix& m, const PauliSum& h) {
  if (m.cols() != static_cast<Eigen::Index>(h.size())) {
    throw DimensionError("M has " + std::to_string(m.cols()) + " columns, Hamiltonian has " +
                         std::to_string(h.size()) + " terms");
  }
  Vector coeff(m.cols());
  for (Eigen::Index l = 0; l < m.cols(); ++l) coeff[l] = h[static_cast<std::size_t>(l)].coefficient;
  Vector g = -(m * coeff);
  Vector var(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < m.cols(); ++l) {
      s += coeff[l] * coeff[l] * std::max(0.0, 1.0 - m(k, l) * m(k, l));
    }
    var[k] = s;
  }
  return {g, var};
}

inline FisherComponents fisher_abc(const std::vector<StateVector>& derivatives,
                                   const StateVector& psi, int workers = 1) {
  const auto nu = static_cast<Eigen::Index>(derivatives.size());
  FisherComponents out{Matrix(nu, nu), Vector(nu), Vector(nu), Matrix(nu, nu)};
  for (Eigen::Index k = 0; k < nu; ++k) {
    const cplx z = inner(derivatives[static_cast<std::size_t>(k)], psi);
    out.b[k] = z.real();
    out.c[k] = z.imag();
  }
  parallel_for(static_cast<std::size_t>(nu), workers, [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.a(kk, kk) = inner(derivatives[k], derivatives[k]).real();
    for (Eigen::Index l = kk + 1; l < nu; ++l) {
      out.a(kk, l) = inner(derivatives[k], derivatives[static_cast<std::size_t>(l)]).real();
    }
  });
  for (Eigen::Index k = 0; k < nu; ++k)
    for (Eigen::Index l = 0; l < k; ++l) out.a(k, l) = out.a(l, k);
  out.fisher = out.a - out.b * out.b.transpose() - out.c * out.c.transpose();
  return out;
}

inline FisherComponents fisher_abc(const AnsatzCircuit& c, const Vector& theta) {
  return fisher_abc(derivative_states(c, theta), prepare_state(c, theta));
}

/// Single-shot variance of F_kl under the A/B/C protocol:
/// (1-A_kl^2) + (1-B_k^2)B_l^2 + (1-B_l^2)B_k^2 + (1-C_k^2)C_l^2 + (1-C_l^2)C_k^2.
inline Matrix fisher_variance(const Matrix& a, const Vector& b, const Vector& c) {
  const Eigen::Index nu = a.rows();
  if (a.cols() != nu || b.size() != nu || c.size() != nu) throw DimensionError("A/B/C shape mismatch");
  auto one_minus_sq = [](double x) { return std::max(0.0, 1.0 - x * x); };
  Matrix var(nu, nu);
  for (Eigen::Index k = 0; k < nu; ++k) {
    for (Eigen::Index l = 0; l < nu; ++l) {
      var(k, l) = one_minus_sq(a(k, l)) + one_minus_sq(b[k]) * b[l] * b[l] +
                  one_minus_sq(b[l]) * b[k] * b[k] + one_minus_sq(c[k]) * c[l] * c[l] +
                  one_minus_sq(c[l]) * c[k] * c[k];
    }
  }
  return var;
}

/// Single-shot variance 1 - F_kl^2 of the SWAP-test protocol.
inline Matrix fisher_swap_variance(const Matrix& fisher) {
  constexpr double kTolerance = 1e-9;
  Matrix var(fisher.rows(), fisher.cols());
  for (Eigen::Index k = 0; k < fisher.rows(); ++k) {
    for (Eigen::Index l = 0; l < fisher.cols(); ++l) {
      const double f = fisher(k, l);
      if (std::abs(f) > 1.0 + kTolerance) {
        throw InvariantError("|F_" + std::to_string(k) + std::to_string(l) + "| = " +
                             std::to_string(std::abs(f)) + " exceeds 1");
      }
      var(k, l) = std::max(0.0, 1.0 - f * f);
    }
  }
  return var;
}

/// Full estimate at one parameter point.
inline MetricEstimate estimate_metric(const AnsatzCircuit& c, const Vector& theta,
                                      const PauliSum& h,
                                      FisherProtocol protocol = FisherProtocol::pure_abc,
                                      int workers = 1) {
  if (h.qubit_count() != c.qubit_count()) throw DimensionError("Hamiltonian / circuit qubit mismatch");
  const StateVector psi = prepare_state(c, theta);
  const auto derivatives = derivative_states(c, theta, workers);

  MetricEstimate m;
  m.protocol = protocol;
  m.energy = expectation(psi, h);
  m.components = fisher_abc(derivatives, psi, workers);
  m.fisher = m.components.fisher;
  m.var_fisher = protocol == FisherProtocol::pure_abc
                     ? fisher_variance(m.components.a, m.components.b, m.components.c)
                     : fisher_swap_variance(m.fisher);
  m.gradient_elements = gradient_matrix_elements(derivatives, psi, h, workers);
  auto [g, var_g] = gradient_with_variance(m.gradient_elements, h);
  m.grad = std::move(g);
  m.var_grad = std::move(var_g);
  m.hamiltonian_coefficients.resize(static_cast<Eigen::Index>(h.size()));
  for (std::size_t l = 0; l < h.size(); ++l) {
    m.hamiltonian_coefficients[static_cast<Eigen::Index>(l)] = h[l].coefficient;
  }
  return m;
}

/// Gradient only, for plain-gradient pre-optimization.
inline Vector exact_gradient(const AnsatzCircuit& c, const Vector& theta, const PauliSum& h) {
  const StateVector psi = prepare_state(c, theta);
  // Single adjoint sweep: g_k = -Im<D_k 0|H|psi> with D_k|0> = V_k P_k V_k^dag |psi>,
  // V_k = U_nu...U_{k+1}; so g_k = -Im<phi_k|P_k|chi_k> with phi, chi pulled back.
  StateVector phi = psi;
  StateVector chi(c.qubit_count(), std::vector<cplx>(psi.dimension(), cplx{0.0, 0.0}));
  for (const auto& t : h.terms()) {
    StateVector p = psi;
    p.apply(t.string);
    for (std::size_t i = 0; i < p.dimension(); ++i) chi[i] += t.coefficient * p[i];
  }
  Vector g(c.parameter_count());
  for (int k = c.parameter_count() - 1; k >= 0; --k) {
    const auto& gen = c.gates()[static_cast<std::size_t>(k)].generator;
    StateVector pk = phi;
    pk.apply(gen);
    g[k] = -inner(pk, chi).imag();
    phi.rotate(gen, -theta[k]);
    chi.rotate(gen, -theta[k]);
  }
  return g;
}

}  // namespace shotcost

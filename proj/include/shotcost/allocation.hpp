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
#include <sstream>
#include <string>
#include <string_view>

#include "shotcost/common.hpp"
#include "shotcost/estimator.hpp"
#include "shotcost/propagation.hpp"

namespace shotcost {

enum class PlanMode { uniform, optimal, optimal_symmetric };

inline std::string to_string(PlanMode m) {
  switch (m) {
    case PlanMode::uniform:
      return "uniform";
    case PlanMode::optimal:
      return "optimal";
    case PlanMode::optimal_symmetric:
      return "optimal_symmetric";
  }
  return "?";
}

inline PlanMode parse_plan_mode(std::string_view name) {
  if (name == "uniform") return PlanMode::uniform;
  if (name == "optimal") return PlanMode::optimal;
  if (name == "optimal_symmetric" || name == "symmetric") return PlanMode::optimal_symmetric;
  throw ConfigError("unknown allocation mode \"" + std::string(name) +
                    "\" (expected uniform, optimal or optimal_symmetric)");
}

/// Shot counts per Fisher entry and per gradient entry. The continuous
/// allocation is kept next to the ceiling-rounded integer plan.
struct AllocationPlan {
  ShotMatrix fisher_shots;
  ShotVector grad_shots;
  long long total = 0;
  double predicted_eps2 = 0.0;
  PlanMode mode = PlanMode::uniform;

  Matrix fisher_continuous;
  Vector grad_continuous;
  double continuous_total = 0.0;

  bool symmetric() const { return mode == PlanMode::optimal_symmetric; }
  Eigen::Index parameter_count() const { return grad_shots.size(); }
};

inline double predicted_epsilon2(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                 const Vector& var_grad, const AllocationPlan& plan) {
  return predicted_epsilon2(pc, var_fisher, var_grad, plan.fisher_shots.cast<double>(),
                            plan.grad_shots.cast<double>(), plan.symmetric());
}

namespace detail {
inline long long ceil_shots(double x) {
  if (x <= 0.0) return 0;
  // Largest double below 2^63; anything beyond cannot be a shot count.
  constexpr double kMaxShots = 9.2e18;
  if (!(x < kMaxShots)) throw PlanError("shot count " + std::to_string(x) + " exceeds the representable range");
  return static_cast<long long>(std::ceil(x - 1e-9 * x));
}

inline void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvariantError("precision eps must be > 0");
}

inline void finish_plan(AllocationPlan& p) {
  const double total = p.fisher_shots.cast<double>().sum() + p.grad_shots.cast<double>().sum();
  if (!(total < 9.2e18)) throw PlanError("total shot count exceeds the representable range");
  p.total = p.fisher_shots.sum() + p.grad_shots.sum();
  p.continuous_total = p.fisher_continuous.sum() + p.grad_continuous.sum();
}
}  // namespace detail

/// Uniform budget: eps^2/2 goes to the matrix and eps^2/2 to the vector,
/// and every entry of one object gets the same (ceiling-rounded, >= 1) count.
inline AllocationPlan uniform_plan(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                   const Vector& var_grad, double eps) {
  detail::check_eps(eps);
  const Eigen::Index nu = pc.b.size();
  const double eps2 = eps * eps;
  const double fisher_weight = (pc.a.array() * var_fisher.array()).sum();
  const double grad_weight = pc.b.dot(var_grad);
  const double per_f = 2.0 * fisher_weight / eps2;
  const double per_g = 2.0 * grad_weight / eps2;

  AllocationPlan p;
  p.mode = PlanMode::uniform;
  p.fisher_continuous = Matrix::Constant(nu, nu, per_f);
  p.grad_continuous = Vector::Constant(nu, per_g);
  p.fisher_shots = ShotMatrix::Constant(nu, nu, std::max<long long>(1, detail::ceil_shots(per_f)));
  p.grad_shots = ShotVector::Constant(nu, std::max<long long>(1, detail::ceil_shots(per_g)));
  detail::finish_plan(p);
  p.predicted_eps2 = predicted_epsilon2(pc, var_fisher, var_grad, p);
  return p;
}

inline AllocationPlan uniform_plan(const MetricEstimate& m, const RegularizedInverse& inv, double eps) {
  return uniform_plan(propagation_coefficients(inv, m.grad), m.var_fisher, m.var_grad, eps);
}

namespace detail {
struct OptimalWeights {
  Matrix fisher;
  Vector grad;
  double sum() const { return fisher.sum() + grad.sum(); }
};

// sqrt(coefficient * Var) per measured entry; zero where nothing is at stake.
inline OptimalWeights optimal_weights(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                      const Vector& var_grad, bool symmetric) {
  const Eigen::Index nu = pc.b.size();
  if (var_fisher.rows() != nu || var_fisher.cols() != nu || var_grad.size() != nu) {
    throw DimensionError("variance / coefficient shape mismatch");
  }
  const Matrix& a = symmetric ? pc.a_sym : pc.a;
  auto root = [](double coefficient, double variance) {
    return (coefficient <= 0.0 || variance <= kZeroVariance) ? 0.0 : std::sqrt(coefficient * variance);
  };
  OptimalWeights w{Matrix::Zero(nu, nu), Vector::Zero(nu)};
  for (Eigen::Index k = 0; k < nu; ++k) {
    for (Eigen::Index l = 0; l < nu; ++l) {
      if (symmetric && l > k) continue;
      w.fisher(k, l) = root(a(k, l), var_fisher(k, l));
    }
    w.grad[k] = root(pc.b[k], var_grad[k]);
  }
  return w;
}
}  // namespace detail

/// Continuous total of the optimal allocation, (sum of square roots)^2 / eps^2.
inline double optimal_total(const PropagationCoefficients& pc, const Matrix& var_fisher, const Vector& var_grad,
                            double eps, bool symmetric) {
  detail::check_eps(eps);
  const double sigma = detail::optimal_weights(pc, var_fisher, var_grad, symmetric).sum();
  return sigma * sigma / (eps * eps);
}

/// Minimum-total allocation for precision eps: each entry gets
/// eps^-2 * Sigma * sqrt(coefficient * Var), Sigma the sum of all square
/// roots. With `symmetric`, the folded coefficients are used and only the
/// lower triangle receives shots.
inline AllocationPlan optimal_plan(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                   const Vector& var_grad, double eps, bool symmetric) {
  detail::check_eps(eps);
  const auto weights = detail::optimal_weights(pc, var_fisher, var_grad, symmetric);
  const Matrix& wf = weights.fisher;
  const Vector& wg = weights.grad;
  const double sigma = wf.sum() + wg.sum();
  const double scale = sigma / (eps * eps);

  AllocationPlan p;
  p.mode = symmetric ? PlanMode::optimal_symmetric : PlanMode::optimal;
  p.fisher_continuous = scale * wf;
  p.grad_continuous = scale * wg;
  p.fisher_shots = p.fisher_continuous.unaryExpr([](double x) { return detail::ceil_shots(x); });
  p.grad_shots = p.grad_continuous.unaryExpr([](double x) { return detail::ceil_shots(x); });
  detail::finish_plan(p);
  p.predicted_eps2 = sigma > 0.0 ? predicted_epsilon2(pc, var_fisher, var_grad, p) : 0.0;
  return p;
}

inline AllocationPlan optimal_plan(const MetricEstimate& m, const RegularizedInverse& inv, double eps,
                                   bool symmetric) {
  return optimal_plan(propagation_coefficients(inv, m.grad), m.var_fisher, m.var_grad, eps, symmetric);
}

/// Closed-form upper bounds on the uniform shot requirements next to the
/// exact requirements they bound.
struct ShotBoundReport {
  double n_f_bound = 0.0;
  double n_g_bound = 0.0;
  double n_f_exact = 0.0;
  double n_g_exact = 0.0;
  bool f_ok() const { return n_f_exact <= n_f_bound * (1.0 + 1e-9); }
  bool g_ok() const { return n_g_exact <= n_g_bound * (1.0 + 1e-9); }
};

/// Default f_F: the largest single-shot Fisher variance of the protocol.
inline double fisher_setup_factor(FisherProtocol p) { return p == FisherProtocol::pure_abc ? 2.0 : 1.0; }

inline ShotBoundReport shot_bounds(const MetricEstimate& m, const RegularizedInverse& inv,
                                      double eps, double f_fisher, double f_grad, double spc_h) {
  detail::check_eps(eps);
  const auto pc = propagation_coefficients(inv, m.grad);
  const double nu = static_cast<double>(m.grad.size());
  const double eps2 = eps * eps;
  const double spc_inv = spc(inv.matrix);
  const double g_inf = m.grad.size() ? m.grad.cwiseAbs().maxCoeff() : 0.0;

  ShotBoundReport r;
  r.n_f_bound = 2.0 / eps2 * std::pow(nu, 4) * spc_inv * spc_inv * g_inf * g_inf * f_fisher;
  r.n_g_bound = 2.0 / eps2 * nu * nu * spc_inv * spc_h * f_grad;
  r.n_f_exact = 2.0 * nu * nu * (pc.a.array() * m.var_fisher.array()).sum() / eps2;
  r.n_g_exact = 2.0 * nu * pc.b.dot(m.var_grad) / eps2;
  return r;
}

/// Cost of the natural-gradient vector relative to a plain gradient.
struct OverheadReport {
  double kappa = 0.0;          // (N_F + N_g) / N_smpl, uniform split
  double kappa_optimal = 0.0;  // N_opt / N_smpl
  double n_f_bound = 0.0;
  double n_g_bound = 0.0;
  double n_f = 0.0;
  double n_g = 0.0;
  double n_opt = 0.0;
  double n_smpl = 0.0;
  double spc_inv = 0.0;
  double y = 0.0;  // N_F / N_smpl
  double kappa_approx = 0.0;  // Spc[Finv] + y
  double kappa_bound = 0.0;   // eta^-2 + y
  double grad_ratio = 0.0;    // N_g / N_smpl
  double grad_ratio_bound = 0.0;

  bool kappa_ok() const { return kappa <= kappa_bound * (1.0 + 1e-9); }
  bool grad_ratio_ok() const { return grad_ratio <= grad_ratio_bound * (1.0 + 1e-9); }
};

/// `eps` is the precision demanded of v; `eps_gradient` that of the plain
/// gradient used for N_smpl (equal in the absolute-precision scheme).
inline OverheadReport overhead_report(const MetricEstimate& m, const RegularizedInverse& inv,
                                      double eps, double f_fisher, double f_grad, double spc_h,
                                      double eps_gradient = -1.0) {
  detail::check_eps(eps);
  if (eps_gradient < 0.0) eps_gradient = eps;
  detail::check_eps(eps_gradient);
  const double nu = static_cast<double>(m.grad.size());
  const auto pc = propagation_coefficients(inv, m.grad);
  const auto t1 = shot_bounds(m, inv, eps, f_fisher, f_grad, spc_h);

  OverheadReport r;
  r.n_f_bound = t1.n_f_bound;
  r.n_g_bound = t1.n_g_bound;
  r.n_f = t1.n_f_exact;
  r.n_g = t1.n_g_exact;
  // Same per-object precision eps^2/2 as N_g.
  r.n_smpl = 2.0 * nu * m.var_grad.sum() / (eps_gradient * eps_gradient);
  if (!(r.n_smpl > 0.0)) throw DegenerateInputError("N_smpl is zero: every gradient variance vanishes");
  r.n_opt = optimal_total(pc, m.var_fisher, m.var_grad, eps, false);
  r.spc_inv = spc(inv.matrix);
  r.kappa = (r.n_f + r.n_g) / r.n_smpl;
  r.kappa_optimal = r.n_opt / r.n_smpl;
  r.y = r.n_f / r.n_smpl;
  r.kappa_approx = r.spc_inv + r.y;
  const double eta_eff = inv.eta > 0.0 ? inv.eta : 1.0 / inv.sigma_max();
  const double scale = (eps * eps) / (eps_gradient * eps_gradient);
  r.grad_ratio = r.n_g / r.n_smpl;
  r.grad_ratio_bound = 1.0 / (eta_eff * eta_eff) / scale;
  r.kappa_bound = r.grad_ratio_bound + r.y;
  return r;
}

/// Heat-map rows "object,k,l,shots,normalized" with one-based k, l; gradient
/// rows use l = 0. `normalized` rescales the continuous allocation so that a
/// uniform spread would give every measured entry exactly one shot.
inline std::string plan_heatmap_csv(const AllocationPlan& p) {
  const Eigen::Index nu = p.parameter_count();
  const double dof = p.symmetric() ? static_cast<double>(nu * (nu + 1) / 2 + nu)
                                   : static_cast<double>(nu * nu + nu);
  const double norm = p.continuous_total > 0.0 ? dof / p.continuous_total : 0.0;
  std::ostringstream out;
  out.precision(17);
  out << "object,k,l,shots,normalized\n";
  for (Eigen::Index k = 0; k < nu; ++k)
    for (Eigen::Index l = 0; l < nu; ++l)
      out << "F," << k + 1 << ',' << l + 1 << ',' << p.fisher_shots(k, l) << ','
          << p.fisher_continuous(k, l) * norm << '\n';
  for (Eigen::Index k = 0; k < nu; ++k)
    out << "g," << k + 1 << ",0," << p.grad_shots[k] << ',' << p.grad_continuous[k] * norm << '\n';
  return out.str();
}

}  // namespace shotcost

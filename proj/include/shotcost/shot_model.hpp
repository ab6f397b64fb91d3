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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shotcost/allocation.hpp"
#include "shotcost/common.hpp"
#include "shotcost/estimator.hpp"
#include "shotcost/propagation.hpp"
#include "shotcost/rng.hpp"

namespace shotcost {

/// One realization of the noisy Fisher matrix and gradient.
struct ShotSample {
  Matrix noisy_fisher;
  Vector noisy_grad;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

/// Shots per unordered Fisher pair: entry (k, l), k >= l, holds the shots of
/// (k, l) plus those of (l, k); one estimate then serves both entries.
inline Matrix pooled_fisher_shots(const AllocationPlan& plan) {
  const Eigen::Index nu = plan.parameter_count();
  Matrix pooled = Matrix::Zero(nu, nu);
  for (Eigen::Index k = 0; k < nu; ++k) {
    pooled(k, k) = static_cast<double>(plan.fisher_shots(k, k));
    for (Eigen::Index l = 0; l < k; ++l) {
      pooled(k, l) = static_cast<double>(plan.fisher_shots(k, l) + plan.fisher_shots(l, k));
    }
  }
  return pooled;
}

/// Predicted eps^2 for the plan as the sampler realizes it (pooled pairs,
/// folded coefficients).
inline double predicted_epsilon2_sampled(const PropagationCoefficients& pc, const Matrix& var_fisher,
                                         const Vector& var_grad, const AllocationPlan& plan) {
  return predicted_epsilon2(pc, var_fisher, var_grad, pooled_fisher_shots(plan),
                            plan.grad_shots.cast<double>(), true);
}

namespace detail {
/// Binomial estimate of a +-1 valued mean: 2 * Binomial(n, (1+x)/2)/n - 1.
inline double sample_signed_mean(CounterRng& rng, double exact, long long shots) {
  const double p = std::clamp(0.5 * (1.0 + exact), 0.0, 1.0);
  return 2.0 * static_cast<double>(rng.binomial(shots, p)) / static_cast<double>(shots) - 1.0;
}
}  // namespace detail

/// Simulates finite sampling of every ancilla probability under `plan`.
/// Each Fisher entry draws its own A, B, C estimates, so entries are
/// independent; (k, l) and (l, k) share one draw. Draws are keyed by
/// (seed, trial, entry) and do not depend on evaluation order.
inline ShotSample sample_estimates(const MetricEstimate& m, const AllocationPlan& plan,
                                   std::uint64_t seed, std::uint64_t trial = 0) {
  const Eigen::Index nu = m.grad.size();
  if (plan.parameter_count() != nu || plan.fisher_shots.rows() != nu || plan.fisher_shots.cols() != nu) {
    throw DimensionError("plan does not match the estimate's parameter count");
  }
  const Matrix pooled = pooled_fisher_shots(plan);
  const auto& comp = m.components;
  ShotSample out{Matrix(nu, nu), Vector(nu), seed, trial};
  const auto unu = static_cast<std::uint64_t>(nu);

  for (Eigen::Index k = 0; k < nu; ++k) {
    for (Eigen::Index l = 0; l <= k; ++l) {
      const auto shots = static_cast<long long>(pooled(k, l));
      double value = m.fisher(k, l);
      if (shots == 0) {
        if (m.var_fisher(k, l) > kZeroVariance) {
          throw PlanError("Fisher entry (" + std::to_string(k + 1) + "," + std::to_string(l + 1) +
                          ") has nonzero variance but no shots");
        }
      } else {
        CounterRng rng(seed, "shots", trial, static_cast<std::uint64_t>(k) * unu + static_cast<std::uint64_t>(l));
        if (m.protocol == FisherProtocol::pure_abc) {
          const double a = detail::sample_signed_mean(rng, comp.a(k, l), shots);
          const double bk = detail::sample_signed_mean(rng, comp.b[k], shots);
          const double bl = detail::sample_signed_mean(rng, comp.b[l], shots);
          const double ck = detail::sample_signed_mean(rng, comp.c[k], shots);
          const double cl = detail::sample_signed_mean(rng, comp.c[l], shots);
          value = a - bk * bl - ck * cl;
        } else {
          value = detail::sample_signed_mean(rng, m.fisher(k, l), shots);
        }
      }
      out.noisy_fisher(k, l) = value;
      out.noisy_fisher(l, k) = value;
    }
  }

  const Matrix& mel = m.gradient_elements;
  const Vector& h = m.hamiltonian_coefficients;
  for (Eigen::Index k = 0; k < nu; ++k) {
    const long long shots = plan.grad_shots[k];
    if (shots == 0) {
      if (m.var_grad[k] > kZeroVariance) {
        throw PlanError("gradient entry " + std::to_string(k + 1) + " has nonzero variance but no shots");
      }
      out.noisy_grad[k] = m.grad[k];
      continue;
    }
    CounterRng rng(seed, "shots", trial, unu * unu + static_cast<std::uint64_t>(k));
    double g = 0.0;
    for (Eigen::Index l = 0; l < mel.cols(); ++l) g -= h[l] * detail::sample_signed_mean(rng, mel(k, l), shots);
    out.noisy_grad[k] = g;
  }
  return out;
}

struct EmpiricalEpsilon {
  double mean = 0.0;     // average of ||v_hat - v||^2
  double standard_error = 0.0;  // standard error of that average
  double predicted = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
  /// False when predicted eps exceeds 0.1 ||v||, outside the first-order regime.
  bool small_error_regime = true;
};

/// Monte-Carlo estimate of <||v_hat - v||^2> with v = (F + eta Id)^-1 g and
/// v_hat from noisy estimates drawn under `plan`.
inline EmpiricalEpsilon empirical_epsilon(const MetricEstimate& m, const AllocationPlan& plan,
                                          long long trials, std::uint64_t seed, double eta,
                                          int workers = 1) {
  if (trials < 100) throw InvariantError("empirical_epsilon needs at least 100 trials");
  const auto inv = regularized_inverse(m.fisher, eta);
  const Vector v = inv.matrix * m.grad;
  const auto pc = propagation_coefficients(inv, m.grad);
  const Eigen::Index nu = m.grad.size();
  const Matrix shift = eta * Matrix::Identity(nu, nu);

  std::vector<double> err(static_cast<std::size_t>(trials));
  parallel_for(err.size(), workers, [&](std::size_t t) {
    const auto s = sample_estimates(m, plan, seed, t);
    const Vector v_hat = (s.noisy_fisher + shift).partialPivLu().solve(s.noisy_grad);
    err[t] = (v_hat - v).squaredNorm();
  });

  EmpiricalEpsilon out;
  out.trials = trials;
  out.seed = seed;
  out.mean = pairwise_sum(err) / static_cast<double>(trials);
  std::vector<double> dev(err.size());
  for (std::size_t t = 0; t < err.size(); ++t) dev[t] = (err[t] - out.mean) * (err[t] - out.mean);
  const double var = pairwise_sum(dev) / static_cast<double>(trials - 1);
  out.standard_error = std::sqrt(var / static_cast<double>(trials));
  out.predicted = predicted_epsilon2_sampled(pc, m.var_fisher, m.var_grad, plan);
  out.small_error_regime = std::sqrt(out.predicted) <= 0.1 * v.norm();
  return out;
}

}  // namespace shotcost

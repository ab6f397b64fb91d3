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


// Shot budget for one natural-gradient step on a 4-qubit chain, uniform vs
// optimal split, and a Monte-Carlo check of the predicted error.

#include <cstdio>

#include "shotcost/allocation.hpp"
#include "shotcost/evolution.hpp"
#include "shotcost/shot_model.hpp"

int main() {
  using namespace shotcost;
  const int n = 4;
  const double eta = 0.1;
  const double eps = 0.05;

  const auto circuit = build_layered_ansatz(n, "B1B2");
  const auto h = build_hamiltonian(HamiltonianKind::chain, n, 1.0, std::uint64_t{7});
  const Vector theta = detail::random_theta(circuit.parameter_count(), 7);

  const auto m = estimate_metric(circuit, theta, h);
  const auto inv = regularized_inverse(m.fisher, eta);
  std::printf("nu = %d  energy = %.6f  |g| = %.4f\n", circuit.parameter_count(), m.energy, m.grad.norm());

  const auto uni = uniform_plan(m, inv, eps);
  const auto opt = optimal_plan(m, inv, eps, false);
  std::printf("uniform: %lld shots, predicted eps^2 %.3e\n", uni.total, uni.predicted_eps2);
  std::printf("optimal: %lld shots, predicted eps^2 %.3e\n", opt.total, opt.predicted_eps2);

  const auto r = overhead_report(m, inv, eps, fisher_setup_factor(m.protocol), 1.0, spc_of_hamiltonian(h));
  std::printf("kappa = %.3f  (Spc[Finv] + y = %.3f, bound %.3f)\n", r.kappa, r.kappa_approx, r.kappa_bound);

  // The sampler pools the (k,l) and (l,k) shots, which the symmetric plan
  // accounts for.
  const auto sym = optimal_plan(m, inv, eps, true);
  std::printf("symmetric: %lld shots, predicted eps^2 %.3e\n", sym.total, sym.predicted_eps2);
  const auto emp = empirical_epsilon(m, sym, 2000, 11, eta);
  std::printf("empirical eps^2 = %.3e +- %.1e over %lld trials\n", emp.mean, emp.standard_error, emp.trials);
  return 0;
}

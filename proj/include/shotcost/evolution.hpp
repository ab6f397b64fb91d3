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
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "shotcost/allocation.hpp"
#include "shotcost/ansatz.hpp"
#include "shotcost/common.hpp"
#include "shotcost/estimator.hpp"
#include "shotcost/pauli.hpp"
#include "shotcost/propagation.hpp"
#include "shotcost/rng.hpp"

namespace shotcost {

enum class EpsMode { absolute, relative };
enum class InitMode { explicit_theta, random, near_optimum };

inline EpsMode parse_eps_mode(std::string_view s) {
  if (s == "absolute") return EpsMode::absolute;
  if (s == "relative") return EpsMode::relative;
  throw ConfigError("unknown eps mode \"" + std::string(s) + "\" (expected absolute or relative)");
}

inline InitMode parse_init_mode(std::string_view s) {
  if (s == "explicit") return InitMode::explicit_theta;
  if (s == "random") return InitMode::random;
  if (s == "near_optimum") return InitMode::near_optimum;
  throw ConfigError("unknown init mode \"" + std::string(s) +
                    "\" (expected explicit, random or near_optimum)");
}

inline std::string to_string(EpsMode m) { return m == EpsMode::absolute ? "absolute" : "relative"; }

inline std::string to_string(InitMode m) {
  switch (m) {
    case InitMode::explicit_theta:
      return "explicit";
    case InitMode::random:
      return "random";
    case InitMode::near_optimum:
      return "near_optimum";
  }
  return "?";
}

struct EvolutionConfig {
  int n = 4;
  std::string pattern = "B1B2B2";

  HamiltonianKind kind = HamiltonianKind::chain;
  double j = 1.0;
  std::vector<double> omega;               // explicit on-site terms; empty = draw
  std::optional<std::uint64_t> omega_seed; // defaults to `seed`

  double eta = 0.1;
  double lambda = 0.2;
  int max_iters = 50;

  EpsMode eps_mode = EpsMode::absolute;
  double eps = 1e-2;  // absolute eps, or eps_0 in relative mode

  std::uint64_t seed = 1;

  InitMode init = InitMode::near_optimum;
  std::vector<double> theta0;
  double perturbation = 0.05;
  int pre_steps = 200;
  double pre_step_size = 0.1;

  FisherProtocol protocol = FisherProtocol::pure_abc;
  Grouping grouping = Grouping::per_term;

  int workers = 1;

  void validate() const {
    if (!(lambda > 0.0)) throw ConfigError("solver.lambda must be > 0");
    if (!(eta >= 0.0)) throw ConfigError("solver.eta must be >= 0");
    if (!(eps > 0.0)) throw ConfigError("eps.value must be > 0");
    if (max_iters < 0) throw ConfigError("solver.max_iters must be >= 0");
    if (n < 2) throw ConfigError("system.n must be >= 2");
    if (workers < 1) throw ConfigError("parallelism must be >= 1");
  }
};

inline PauliSum build_hamiltonian(const EvolutionConfig& cfg) {
  if (!cfg.omega.empty()) return build_hamiltonian(cfg.kind, cfg.n, cfg.j, cfg.omega);
  return build_hamiltonian(cfg.kind, cfg.n, cfg.j, cfg.omega_seed.value_or(cfg.seed));
}

/// Smallest eigenvalue of H by dense diagonalization (N <= 10).
inline double ground_state_energy(const PauliSum& h) {
  const int n = h.qubit_count();
  if (n > 10) throw DimensionError("exact diagonalization limited to 10 qubits");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      dense(static_cast<Eigen::Index>(ub ^ t.string.x_mask()), b) += t.coefficient * t.string.phase(ub);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

/// theta' = theta - lambda * Finv g.
inline Vector step(const Vector& theta, const MetricEstimate& m, const RegularizedInverse& inv,
                   double lambda) {
  if (theta.size() != m.grad.size() || inv.dimension() != theta.size()) {
    throw DimensionError("step: parameter / estimate size mismatch");
  }
  Vector next = theta - lambda * (inv.matrix * m.grad);
  if (!next.allFinite()) throw InvariantError("step produced non-finite parameters");
  return next;
}

struct TraceRecord {
  int t = 0;
  Vector theta;
  double energy = 0.0;
  double grad_norm = 0.0;
  double grad_inf = 0.0;
  double natgrad_norm = 0.0;
  double kappa_uniform = 0.0;
  double kappa_optimal = 0.0;
  double kappa_approx = 0.0;
  double kappa_bound = 0.0;
  double n_f = 0.0;
  double n_g = 0.0;
  double n_opt = 0.0;
  double n_smpl = 0.0;
  double n_f_bound = 0.0;
  double n_g_bound = 0.0;
  double spc_inv = 0.0;
  double y = 0.0;
  double fisher_max_abs = 0.0;
  bool spectral_bounds_ok = true;
  bool shot_bounds_ok = true;
  bool overhead_ok = true;
};

struct EvolutionTrace {
  std::vector<TraceRecord> records;
  Vector theta0;
  Vector final_theta;
  double ground_energy = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  int diverged_at = -1;
};

namespace detail {
inline Vector random_theta(int nu, std::uint64_t seed, std::uint64_t instance = 0) {
  CounterRng rng(seed, "theta0", instance);
  Vector theta(nu);
  for (int k = 0; k < nu; ++k) theta[k] = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return theta;
}
}  // namespace detail

/// Starting parameters per the configured init mode. near_optimum runs
/// plain-gradient pre-optimization from a random point, then adds Gaussian
/// noise of scale `perturbation`.
inline Vector initial_theta(const EvolutionConfig& cfg, const AnsatzCircuit& c, const PauliSum& h) {
  const int nu = c.parameter_count();
  switch (cfg.init) {
    case InitMode::explicit_theta: {
      if (static_cast<int>(cfg.theta0.size()) != nu) {
        throw ConfigError("init.theta has " + std::to_string(cfg.theta0.size()) +
                          " entries, ansatz has " + std::to_string(nu) + " parameters");
      }
      return Eigen::Map<const Vector>(cfg.theta0.data(), nu);
    }
    case InitMode::random:
      return detail::random_theta(nu, cfg.seed);
    case InitMode::near_optimum: {
      Vector theta = detail::random_theta(nu, cfg.seed);
      for (int s = 0; s < cfg.pre_steps; ++s) theta -= cfg.pre_step_size * exact_gradient(c, theta, h);
      CounterRng rng(cfg.seed, "perturb");
      for (int k = 0; k < nu; ++k) theta[k] += cfg.perturbation * rng.normal();
      return theta;
    }
  }
  return Vector::Zero(nu);
}

/// Cost diagnostics of one parameter point, filled into a trace record.
inline TraceRecord diagnose(const MetricEstimate& m, const RegularizedInverse& inv, const PauliSum& h,
                            const EvolutionConfig& cfg) {
  TraceRecord r;
  r.energy = m.energy;
  r.grad_norm = m.grad.norm();
  r.grad_inf = m.grad.size() ? m.grad.cwiseAbs().maxCoeff() : 0.0;
  const Vector v = inv.matrix * m.grad;
  r.natgrad_norm = v.norm();
  r.fisher_max_abs = m.fisher.cwiseAbs().maxCoeff();
  r.spectral_bounds_ok = check_spectral_bounds(inv).ok();

  double eps_v = cfg.eps;
  double eps_g = cfg.eps;
  if (cfg.eps_mode == EpsMode::relative) {
    eps_v = cfg.eps * r.natgrad_norm;
    eps_g = cfg.eps * r.grad_norm;
  }
  r.spc_inv = spc(inv.matrix);
  if (!(eps_v > 0.0) || !(eps_g > 0.0) || !(m.var_grad.sum() > 0.0)) {
    // Exactly stationary point or vanishing gradient variance: costs undefined.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.kappa_uniform = r.kappa_optimal = r.kappa_approx = r.kappa_bound = nan;
    r.n_f = r.n_g = r.n_opt = r.n_smpl = r.n_f_bound = r.n_g_bound = r.y = nan;
    return r;
  }
  const double f_f = fisher_setup_factor(m.protocol);
  const double f_g = gradient_setup_factor(h, cfg.grouping);
  const auto o = overhead_report(m, inv, eps_v, f_f, f_g, spc_of_hamiltonian(h), eps_g);
  r.kappa_uniform = o.kappa;
  r.kappa_optimal = o.kappa_optimal;
  r.kappa_approx = o.kappa_approx;
  r.kappa_bound = o.kappa_bound;
  r.n_f = o.n_f;
  r.n_g = o.n_g;
  r.n_opt = o.n_opt;
  r.n_smpl = o.n_smpl;
  r.n_f_bound = o.n_f_bound;
  r.n_g_bound = o.n_g_bound;
  r.y = o.y;
  r.shot_bounds_ok = o.n_f <= o.n_f_bound * (1.0 + 1e-9) && o.n_g <= o.n_g_bound * (1.0 + 1e-9);
  r.overhead_ok = o.kappa_ok() && o.grad_ratio_ok();
  return r;
}

/// Natural-gradient descent with per-iteration cost diagnostics. The metric
/// is re-estimated at every iteration. Energy increasing for 20 consecutive
/// steps marks the run as diverged; iteration continues regardless.
inline EvolutionTrace run(const EvolutionConfig& cfg) {
  cfg.validate();
  const AnsatzCircuit circuit = build_layered_ansatz(cfg.n, cfg.pattern);
  const PauliSum h = build_hamiltonian(cfg);

  EvolutionTrace trace;
  if (cfg.n <= 10) trace.ground_energy = ground_state_energy(h);
  Vector theta = initial_theta(cfg, circuit, h);
  trace.theta0 = theta;

  int rising = 0;
  double last_energy = std::numeric_limits<double>::infinity();
  for (int t = 0; t < cfg.max_iters; ++t) {
    const auto m = estimate_metric(circuit, theta, h, cfg.protocol, cfg.workers);
    const auto inv = regularized_inverse(m.fisher, cfg.eta);
    TraceRecord r = diagnose(m, inv, h, cfg);
    r.t = t;
    r.theta = theta;
    rising = m.energy > last_energy ? rising + 1 : 0;
    last_energy = m.energy;
    if (rising >= 20 && !trace.diverged) {
      trace.diverged = true;
      trace.diverged_at = t;
    }
    trace.records.push_back(std::move(r));
    theta = step(theta, m, inv, cfg.lambda);
  }
  trace.final_theta = theta;
  return trace;
}

/// Column order of the trace CSV.
inline constexpr const char* kTraceCsvHeader =
    "t,energy,grad_norm,natgrad_norm,kappa_uniform,kappa_optimal,n_f,n_g,n_opt,spc_inv";

struct ScanSettings {
  std::string pattern = "B1B2B2";
  double j = 1.0;
  double eta = 0.1;
  double lambda = 0.2;
  int max_iters = 2000;
  FisherProtocol protocol = FisherProtocol::pure_abc;
  int workers = 1;
  // Halve the step while it would raise the energy. Wide spectra (cubic
  // Hamiltonians at N >= 8) otherwise oscillate at lambda = 0.2.
  bool backtracking = true;
};

struct ScanRow {
  int n = 0;
  int instance = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // N_F / N_g
  int iterations = 0;
  bool converged = false;
};

struct ScanAggregate {
  int n = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  int count = 0;
  int excluded = 0;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::vector<ScanAggregate> aggregate;
};

/// For each qubit count and instance: descend by natural gradient from a
/// random point until ||v|| <= target, then record the exact uniform
/// N_F / N_g. Instances that miss the target within max_iters are excluded
/// from the aggregate.
inline ScanTable qubit_scan(HamiltonianKind kind, const std::vector<int>& n_list,
                            double target_natgrad_norm, int instances, std::uint64_t seed,
                            const ScanSettings& settings = {}) {
  if (instances < 1) throw ConfigError("scan.instances must be >= 1");
  if (!(target_natgrad_norm > 0.0)) throw ConfigError("scan.target must be > 0");
  ScanTable table;
  for (int n : n_list) {
    const AnsatzCircuit circuit = build_layered_ansatz(n, settings.pattern);
    const PauliSum h = build_hamiltonian(kind, n, settings.j, seed);
    std::vector<ScanRow> rows(static_cast<std::size_t>(instances));
    parallel_for(rows.size(), settings.workers, [&](std::size_t i) {
      ScanRow& row = rows[i];
      row.n = n;
      row.instance = static_cast<int>(i);
      Vector theta = detail::random_theta(circuit.parameter_count(), seed,
                                          (static_cast<std::uint64_t>(n) << 32) | i);
      for (int it = 0; it <= settings.max_iters; ++it) {
        const auto m = estimate_metric(circuit, theta, h, settings.protocol);
        const auto inv = regularized_inverse(m.fisher, settings.eta);
        if ((inv.matrix * m.grad).norm() <= target_natgrad_norm) {
          const auto t1 = shot_bounds(m, inv, 1.0, fisher_setup_factor(settings.protocol), 1.0,
                                          spc_of_hamiltonian(h));
          row.ratio = t1.n_f_exact / t1.n_g_exact;
          row.iterations = it;
          row.converged = true;
          return;
        }
        double lambda = settings.lambda;
        Vector next = step(theta, m, inv, lambda);
        while (settings.backtracking && lambda > settings.lambda * 1e-6 &&
               expectation(prepare_state(circuit, next), h) > m.energy) {
          lambda *= 0.5;
          next = step(theta, m, inv, lambda);
        }
        theta = std::move(next);
      }
      row.iterations = settings.max_iters;
    });
    ScanAggregate agg;
    agg.n = n;
    std::vector<double> ratios;
    for (const auto& r : rows) {
      if (r.converged && std::isfinite(r.ratio)) {
        ratios.push_back(r.ratio);
      } else {
        ++agg.excluded;
      }
    }
    agg.count = static_cast<int>(ratios.size());
    if (agg.count > 0) {
      agg.mean = pairwise_sum(ratios) / agg.count;
      double ss = 0.0;
      for (double r : ratios) ss += (r - agg.mean) * (r - agg.mean);
      agg.std = std::sqrt(ss / agg.count);
    } else {
      agg.mean = agg.std = std::numeric_limits<double>::quiet_NaN();
    }
    table.aggregate.push_back(agg);
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  return table;
}

}  // namespace shotcost

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

#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "shotcost/evolution.hpp"

namespace shotcost::cli {

/// Everything a subcommand can read from the config file.
///
/// Key schema (YAML, nested maps):
///   system.n                       qubit count
///   ansatz.pattern                 block string, e.g. B1B2B2
///   hamiltonian.kind               chain | quadratic | cubic
///   hamiltonian.j                  coupling
///   hamiltonian.omega              explicit on-site list (optional)
///   hamiltonian.omega_seed         seed for random on-site terms (optional)
///   solver.eta / solver.lambda / solver.max_iters
///   eps.mode                       absolute | relative
///   eps.value
///   seed                           root seed
///   init.mode                      explicit | random | near_optimum
///   init.theta / init.perturbation / init.pre_steps / init.pre_step_size
///   estimator.fisher_protocol      pure_abc | swap_test
///   estimator.grouping             per_term | qubitwise
///   allocation.mode                uniform | optimal | optimal_symmetric
///   validate.trials
///   scan.n_list / scan.instances / scan.target / scan.max_iters
///   scan.backtracking              halve the step while energy would rise
///   parallelism
struct Config {
  EvolutionConfig evolution;
  std::string allocation_mode = "optimal";
  long long validate_trials = 10000;
  std::vector<int> scan_n_list{4, 6, 8};
  int scan_instances = 10;
  double scan_target = 0.1;
  int scan_max_iters = 2000;
  bool scan_backtracking = true;

  YAML::Node effective;  // parsed tree after overrides, echoed into manifests
};

/// Parses YAML text. `overrides` holds "dotted.key=value" pairs applied on
/// top of the file. Throws ConfigError naming the line or key at fault.
Config parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

Config load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// YAML text of the effective configuration.
std::string echo_config(const Config& cfg);

}  // namespace shotcost::cli

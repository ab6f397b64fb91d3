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


#include "cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace shotcost::cli {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.n",           "ansatz.pattern",         "hamiltonian.kind",
      "hamiltonian.j",      "hamiltonian.omega",      "hamiltonian.omega_seed",
      "solver.eta",         "solver.lambda",          "solver.max_iters",
      "eps.mode",           "eps.value",              "seed",
      "init.mode",          "init.theta",             "init.perturbation",
      "init.pre_steps",     "init.pre_step_size",     "estimator.fisher_protocol",
      "estimator.grouping", "allocation.mode",        "validate.trials",
      "scan.n_list",        "scan.instances",         "scan.target",
      "scan.max_iters",     "scan.backtracking",     "parallelism"};
  return keys;
}

std::string where(const YAML::Node& node, const std::string& key) {
  const auto mark = node.Mark();
  if (mark.line >= 0) return "line " + std::to_string(mark.line + 1) + ", key '" + key + "'";
  return "key '" + key + "'";
}

void collect_keys(const YAML::Node& node, const std::string& prefix) {
  if (!node.IsMap()) {
    if (!known_keys().count(prefix)) throw ConfigError(where(node, prefix) + ": unknown key");
    return;
  }
  for (const auto& kv : node) {
    const std::string key = prefix.empty() ? kv.first.as<std::string>() : prefix + "." + kv.first.as<std::string>();
    if (kv.second.IsMap()) {
      collect_keys(kv.second, key);
    } else if (!known_keys().count(key)) {
      throw ConfigError(where(kv.first, key) + ": unknown key");
    }
  }
}

YAML::Node lookup_parts(const YAML::Node& node, const std::vector<std::string>& parts, std::size_t i) {
  if (i == parts.size()) return node;
  if (!node.IsMap()) return YAML::Node();
  const YAML::Node child = node[parts[i]];
  if (!child.IsDefined()) return YAML::Node();
  return lookup_parts(child, parts, i + 1);
}

std::vector<std::string> split_key(const std::string& dotted) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  return parts;
}

YAML::Node lookup(const YAML::Node& root, const std::string& dotted) {
  return lookup_parts(root, split_key(dotted), 0);
}

template <typename T>
bool read(const YAML::Node& root, const std::string& key, T& out) {
  const YAML::Node n = lookup(root, key);
  if (!n.IsDefined() || n.IsNull()) return false;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(n, key) + ": invalid value '" + YAML::Dump(n) + "'");
  }
  return true;
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key=value");
  }
  const std::string key = assignment.substr(0, eq);
  if (!known_keys().count(key)) throw ConfigError("override names unknown key '" + key + "'");
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + assignment + "': " + e.msg);
  }
  const std::vector<std::string> parts = split_key(key);
  // Walk by reassigning a handle; yaml-cpp nodes are reference-like.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node child = chain.back()[parts[i]];
    if (!child.IsMap()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      child = chain.back()[parts[i]];
    }
    chain.push_back(child);
  }
  chain.back()[parts.back()] = value;
}

template <typename F>
auto keyed(const YAML::Node& root, const std::string& key, F&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(where(lookup(root, key), key) + ": " + e.what());
  }
}

}  // namespace

Config parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config must be a YAML mapping");
  collect_keys(root, "");
  for (const auto& o : overrides) apply_override(root, o);

  Config cfg;
  auto& e = cfg.evolution;
  read(root, "system.n", e.n);
  read(root, "ansatz.pattern", e.pattern);
  std::string s;
  if (read(root, "hamiltonian.kind", s)) e.kind = keyed(root, "hamiltonian.kind", [&] { return parse_hamiltonian_kind(s); });
  read(root, "hamiltonian.j", e.j);
  read(root, "hamiltonian.omega", e.omega);
  std::uint64_t omega_seed = 0;
  if (read(root, "hamiltonian.omega_seed", omega_seed)) e.omega_seed = omega_seed;
  read(root, "solver.eta", e.eta);
  read(root, "solver.lambda", e.lambda);
  read(root, "solver.max_iters", e.max_iters);
  if (read(root, "eps.mode", s)) e.eps_mode = keyed(root, "eps.mode", [&] { return parse_eps_mode(s); });
  read(root, "eps.value", e.eps);
  read(root, "seed", e.seed);
  if (read(root, "init.mode", s)) e.init = keyed(root, "init.mode", [&] { return parse_init_mode(s); });
  read(root, "init.theta", e.theta0);
  read(root, "init.perturbation", e.perturbation);
  read(root, "init.pre_steps", e.pre_steps);
  read(root, "init.pre_step_size", e.pre_step_size);
  if (read(root, "estimator.fisher_protocol", s)) e.protocol = keyed(root, "estimator.fisher_protocol", [&] { return parse_fisher_protocol(s); });
  if (read(root, "estimator.grouping", s)) e.grouping = keyed(root, "estimator.grouping", [&] { return parse_grouping(s); });
  read(root, "parallelism", e.workers);
  read(root, "allocation.mode", cfg.allocation_mode);
  keyed(root, "allocation.mode", [&] { return parse_plan_mode(cfg.allocation_mode); });
  read(root, "validate.trials", cfg.validate_trials);
  read(root, "scan.n_list", cfg.scan_n_list);
  read(root, "scan.instances", cfg.scan_instances);
  read(root, "scan.target", cfg.scan_target);
  read(root, "scan.max_iters", cfg.scan_max_iters);
  read(root, "scan.backtracking", cfg.scan_backtracking);

  keyed(root, "ansatz.pattern", [&] { return parse_block_pattern(e.pattern); });
  if (!e.omega.empty() && static_cast<int>(e.omega.size()) != e.n) {
    throw ConfigError("key 'hamiltonian.omega': expected " + std::to_string(e.n) + " values");
  }
  e.validate();
  cfg.effective = root;
  return cfg;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string echo_config(const Config& cfg) {
  YAML::Emitter out;
  out << cfg.effective;
  return std::string(out.c_str()) + "\n";
}

}  // namespace shotcost::cli

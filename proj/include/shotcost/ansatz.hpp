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
#include <string_view>
#include <vector>

#include "shotcost/common.hpp"
#include "shotcost/pauli.hpp"
#include "shotcost/statevector.hpp"

namespace shotcost {

/// One parametrized gate exp(-i theta P / 2) with a single Pauli generator.
struct GateSpec {
  PauliString generator;
  int parameter_index = 0;  // zero-based; equals the gate position
};

enum class Block { B1, B2 };

/// Parses a block pattern such as "B1B2B2".
inline std::vector<Block> parse_block_pattern(std::string_view pattern) {
  std::vector<Block> blocks;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern.substr(i, 2) == "B1") {
      blocks.push_back(Block::B1);
    } else if (pattern.substr(i, 2) == "B2") {
      blocks.push_back(Block::B2);
    } else {
      throw ConfigError("unknown ansatz block at position " + std::to_string(i) + " of \"" +
                        std::string(pattern) + "\" (expected B1 or B2)");
    }
    i += 2;
  }
  if (blocks.empty()) throw ConfigError("empty ansatz pattern");
  return blocks;
}

inline std::string block_pattern_string(const std::vector<Block>& blocks) {
  std::string s;
  for (Block b : blocks) s += b == Block::B1 ? "B1" : "B2";
  return s;
}

/// Ordered product U_nu ... U_1 of single-parameter Pauli rotations.
class AnsatzCircuit {
 public:
  AnsatzCircuit(int qubit_count, std::vector<GateSpec> gates)
      : qubit_count_(qubit_count), gates_(std::move(gates)) {
    if (qubit_count <= 0) throw DimensionError("qubit count must be positive");
    for (std::size_t k = 0; k < gates_.size(); ++k) {
      if (gates_[k].generator.qubit_count() != qubit_count) {
        throw DimensionError("gate " + std::to_string(k) + " generator has wrong qubit count");
      }
      if (gates_[k].generator.is_identity()) {
        throw InvariantError("gate " + std::to_string(k) + " has an identity generator");
      }
      if (gates_[k].parameter_index != static_cast<int>(k)) {
        throw InvariantError("parameter indices must run 1..nu in gate order");
      }
    }
  }

  int qubit_count() const { return qubit_count_; }
  int parameter_count() const { return static_cast<int>(gates_.size()); }
  const std::vector<GateSpec>& gates() const { return gates_; }

 private:
  int qubit_count_;
  std::vector<GateSpec> gates_;
};

/// Layered ansatz: B1 = X rotation on every qubit; B2 = ZZ on every ring
/// pair (i, i+1) and (N, 1), then Y on every qubit, then X on every qubit.
inline AnsatzCircuit build_layered_ansatz(int n, const std::vector<Block>& pattern) {
  if (n < 2) throw InvariantError("layered ansatz needs at least 2 qubits");
  std::vector<GateSpec> gates;
  auto add = [&](PauliString p) {
    const int idx = static_cast<int>(gates.size());
    gates.push_back({std::move(p), idx});
  };
  for (Block block : pattern) {
    if (block == Block::B1) {
      for (int q = 0; q < n; ++q) add(PauliString::on(n, {{q, 'X'}}));
      continue;
    }
    for (int q = 0; q + 1 < n; ++q) add(PauliString::on(n, {{q, 'Z'}, {q + 1, 'Z'}}));
    // Ring closure. For n = 2 this repeats the (1, 2) coupling as its own gate.
    {
      std::string axes(static_cast<std::size_t>(n), 'I');
      axes.front() = 'Z';
      axes.back() = 'Z';
      add(PauliString(axes));
    }
    for (int q = 0; q < n; ++q) add(PauliString::on(n, {{q, 'Y'}}));
    for (int q = 0; q < n; ++q) add(PauliString::on(n, {{q, 'X'}}));
  }
  return AnsatzCircuit(n, std::move(gates));
}

inline AnsatzCircuit build_layered_ansatz(int n, std::string_view pattern) {
  return build_layered_ansatz(n, parse_block_pattern(pattern));
}

namespace detail {
inline void check_theta(const AnsatzCircuit& c, const Vector& theta) {
  if (theta.size() != c.parameter_count()) {
    throw DimensionError("parameter vector has " + std::to_string(theta.size()) +
                         " entries, circuit has " + std::to_string(c.parameter_count()));
  }
}
}  // namespace detail

/// U_nu(theta_nu) ... U_1(theta_1) |0...0>.
inline StateVector prepare_state(const AnsatzCircuit& c, const Vector& theta) {
  detail::check_theta(c, theta);
  StateVector s(c.qubit_count());
  for (const auto& g : c.gates()) s.rotate(g.generator, theta[g.parameter_index]);
  return s;
}

/// D_k|0> = U_nu ... U_{k+1} P_k U_k ... U_1 |0>, so that
/// d_k |psi> = -(i/2) D_k |0>. `k` is zero-based.
inline StateVector derivative_state(const AnsatzCircuit& c, const Vector& theta, int k) {
  detail::check_theta(c, theta);
  if (k < 0 || k >= c.parameter_count()) {
    throw DimensionError("derivative index " + std::to_string(k) + " out of range");
  }
  StateVector s(c.qubit_count());
  const auto& gates = c.gates();
  for (int i = 0; i <= k; ++i) s.rotate(gates[static_cast<std::size_t>(i)].generator, theta[i]);
  s.apply(gates[static_cast<std::size_t>(k)].generator);
  for (int i = k + 1; i < c.parameter_count(); ++i) {
    s.rotate(gates[static_cast<std::size_t>(i)].generator, theta[i]);
  }
  return s;
}

/// All D_k|0>, computed independently per k.
inline std::vector<StateVector> derivative_states(const AnsatzCircuit& c, const Vector& theta,
                                                  int workers = 1) {
  detail::check_theta(c, theta);
  const auto nu = static_cast<std::size_t>(c.parameter_count());
  std::vector<StateVector> out(nu, StateVector(c.qubit_count()));
  // Prefix states U_k ... U_1 |0> are shared; each branch then applies P_k
  // and the remaining suffix.
  std::vector<StateVector> prefix;
  prefix.reserve(nu);
  StateVector s(c.qubit_count());
  for (std::size_t k = 0; k < nu; ++k) {
    s.rotate(c.gates()[k].generator, theta[static_cast<Eigen::Index>(k)]);
    prefix.push_back(s);
  }
  parallel_for(nu, workers, [&](std::size_t k) {
    StateVector d = prefix[k];
    d.apply(c.gates()[k].generator);
    for (std::size_t i = k + 1; i < nu; ++i) d.rotate(c.gates()[i].generator, theta[static_cast<Eigen::Index>(i)]);
    out[k] = std::move(d);
  });
  return out;
}

}  // namespace shotcost

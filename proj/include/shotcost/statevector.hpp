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
#include <vector>

#include "shotcost/common.hpp"
#include "shotcost/pauli.hpp"

namespace shotcost {

/// Dense amplitude vector of an N-qubit pure state. Basis index bit q holds
/// qubit q.
class StateVector {
 public:
  static constexpr int kMaxQubits = 26;

  /// |0...0>.
  explicit StateVector(int qubit_count) : qubit_count_(qubit_count) {
    if (qubit_count <= 0 || qubit_count > kMaxQubits) {
      throw DimensionError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
    }
    amplitudes_.assign(std::size_t{1} << qubit_count, cplx{0.0, 0.0});
    amplitudes_[0] = 1.0;
  }

  StateVector(int qubit_count, std::vector<cplx> amplitudes)
      : qubit_count_(qubit_count), amplitudes_(std::move(amplitudes)) {
    if (qubit_count <= 0 || qubit_count > kMaxQubits ||
        amplitudes_.size() != (std::size_t{1} << qubit_count)) {
      throw DimensionError("amplitude count does not match 2^N");
    }
  }

  int qubit_count() const { return qubit_count_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  const std::vector<cplx>& amplitudes() const { return amplitudes_; }
  cplx operator[](std::size_t i) const { return amplitudes_[i]; }
  cplx& operator[](std::size_t i) { return amplitudes_[i]; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return std::sqrt(s);
  }

  /// In-place exp(-i theta P / 2).
  void rotate(const PauliString& p, double theta) {
    check(p);
    if (p.is_identity()) throw InvariantError("rotation generator must be non-identity");
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const cplx minus_i_s{0.0, -s};
    const std::uint64_t x = p.x_mask();
    const std::size_t dim = amplitudes_.size();
    if (x == 0) {
      for (std::size_t b = 0; b < dim; ++b) amplitudes_[b] *= c + minus_i_s * p.phase(b);
      return;
    }
    for (std::size_t b = 0; b < dim; ++b) {
      const std::size_t partner = b ^ x;
      if (partner < b) continue;
      const cplx a0 = amplitudes_[b];
      const cplx a1 = amplitudes_[partner];
      // (P a)[partner] = phase(b) a[b], (P a)[b] = phase(partner) a[partner]
      amplitudes_[b] = c * a0 + minus_i_s * p.phase(partner) * a1;
      amplitudes_[partner] = c * a1 + minus_i_s * p.phase(b) * a0;
    }
  }

  /// In-place action of the Pauli string.
  void apply(const PauliString& p) {
    check(p);
    const std::uint64_t x = p.x_mask();
    const std::size_t dim = amplitudes_.size();
    if (x == 0) {
      for (std::size_t b = 0; b < dim; ++b) amplitudes_[b] *= p.phase(b);
      return;
    }
    for (std::size_t b = 0; b < dim; ++b) {
      const std::size_t partner = b ^ x;
      if (partner < b) continue;
      const cplx a0 = amplitudes_[b];
      amplitudes_[b] = p.phase(partner) * amplitudes_[partner];
      amplitudes_[partner] = p.phase(b) * a0;
    }
  }

 private:
  void check(const PauliString& p) const {
    if (p.qubit_count() != qubit_count_) {
      throw DimensionError("Pauli string \"" + p.axes() + "\" does not match " +
                           std::to_string(qubit_count_) + " qubits");
    }
  }

  int qubit_count_;
  std::vector<cplx> amplitudes_;
};

inline StateVector apply_pauli_rotation(StateVector s, const PauliString& p, double theta) {
  s.rotate(p, theta);
  return s;
}

inline StateVector apply_pauli_string(StateVector s, const PauliString& p) {
  s.apply(p);
  return s;
}

/// <a|b>, summed in index order.
inline cplx inner(const StateVector& a, const StateVector& b) {
  if (a.qubit_count() != b.qubit_count()) throw DimensionError("inner product of unequal qubit counts");
  double re = 0.0, im = 0.0;
  const auto& x = a.amplitudes();
  const auto& y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx t = std::conj(x[i]) * y[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

/// <s|P|s> without materializing P|s>.
inline double pauli_expectation(const StateVector& s, const PauliString& p) {
  if (p.qubit_count() != s.qubit_count()) throw DimensionError("Pauli string / state qubit mismatch");
  const auto& a = s.amplitudes();
  const std::uint64_t x = p.x_mask();
  double re = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) {
    re += (std::conj(a[b ^ x]) * p.phase(b) * a[b]).real();
  }
  return re;
}

/// <s|H|s>.
inline double expectation(const StateVector& s, const PauliSum& h) {
  if (h.qubit_count() != s.qubit_count()) throw DimensionError("Hamiltonian / state qubit mismatch");
  double e = 0.0;
  for (const auto& t : h.terms()) e += t.coefficient * pauli_expectation(s, t.string);
  return e;
}

}  // namespace shotcost

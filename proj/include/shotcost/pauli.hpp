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
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shotcost/common.hpp"
#include "shotcost/rng.hpp"

namespace shotcost {

/// Tensor product of single-qubit Pauli operators, written as a string over
/// {I, X, Y, Z}. Character q acts on qubit q, which is bit q of a basis-state
/// index.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::string axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 62) {
      throw DimensionError("Pauli string length must be in [1, 62], got " +
                           std::to_string(axes_.size()));
    }
    for (std::size_t q = 0; q < axes_.size(); ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      switch (axes_[q]) {
        case 'I':
          break;
        case 'X':
          x_mask_ |= bit;
          break;
        case 'Y':
          x_mask_ |= bit;
          z_mask_ |= bit;
          ++y_count_;
          break;
        case 'Z':
          z_mask_ |= bit;
          break;
        default:
          throw InvariantError("invalid Pauli axis '" + std::string(1, axes_[q]) +
                               "' in \"" + axes_ + "\"");
      }
    }
  }

  /// Single-qubit or two-qubit operator on an otherwise identity string.
  static PauliString on(int qubit_count, std::initializer_list<std::pair<int, char>> sites) {
    std::string axes(static_cast<std::size_t>(qubit_count), 'I');
    for (const auto& [q, axis] : sites) {
      if (q < 0 || q >= qubit_count) throw DimensionError("qubit index out of range");
      axes[static_cast<std::size_t>(q)] = axis;
    }
    return PauliString(std::move(axes));
  }

  const std::string& axes() const { return axes_; }
  int qubit_count() const { return static_cast<int>(axes_.size()); }
  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }
  bool is_identity() const { return x_mask_ == 0 && z_mask_ == 0; }

  /// Phase picked up by basis state |b> under P: P|b> = phase(b) |b ^ x_mask>.
  cplx phase(std::uint64_t b) const {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx base = kIPow[y_count_ & 3];
    return (std::popcount(b & z_mask_) & 1) ? -base : base;
  }

  char operator[](int q) const { return axes_[static_cast<std::size_t>(q)]; }

  friend bool operator==(const PauliString& a, const PauliString& b) { return a.axes_ == b.axes_; }
  friend auto operator<=>(const PauliString& a, const PauliString& b) { return a.axes_ <=> b.axes_; }

 private:
  std::string axes_;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  int y_count_ = 0;
};

struct PauliTerm {
  PauliString string;
  double coefficient = 0.0;
};

/// Real-weighted sum of Pauli strings with canonical term order: terms are
/// merged by axes, sorted lexicographically, and merged coefficients with
/// magnitude below 1e-12 are dropped.
class PauliSum {
 public:
  static constexpr double kDropTolerance = 1e-12;

  explicit PauliSum(int qubit_count, const std::vector<PauliTerm>& terms = {})
      : qubit_count_(qubit_count) {
    if (qubit_count <= 0) throw DimensionError("qubit count must be positive");
    std::map<std::string, double> merged;
    for (const auto& t : terms) {
      if (t.string.qubit_count() != qubit_count) {
        throw DimensionError("term \"" + t.string.axes() + "\" has " +
                             std::to_string(t.string.qubit_count()) + " qubits, expected " +
                             std::to_string(qubit_count));
      }
      if (!std::isfinite(t.coefficient)) throw InvariantError("non-finite Pauli coefficient");
      merged[t.string.axes()] += t.coefficient;
    }
    for (const auto& [axes, c] : merged) {
      if (std::abs(c) >= kDropTolerance) terms_.push_back({PauliString(axes), c});
    }
  }

  int qubit_count() const { return qubit_count_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  const PauliTerm& operator[](std::size_t i) const { return terms_[i]; }

  /// Sum of |h_l|; bounds every expectation value.
  double l1_norm() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coefficient);
    return s;
  }

  friend bool operator==(const PauliSum& a, const PauliSum& b) {
    if (a.qubit_count_ != b.qubit_count_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].string != b.terms_[i].string ||
          a.terms_[i].coefficient != b.terms_[i].coefficient) {
        return false;
      }
    }
    return true;
  }

 private:
  int qubit_count_;
  std::vector<PauliTerm> terms_;
};

/// Tr[H^2]/2^N, i.e. the sum of squared Pauli coefficients. An empty sum
/// returns zero.
inline double spc_of_hamiltonian(const PauliSum& h) {
  double s = 0.0;
  for (const auto& t : h.terms()) s += t.coefficient * t.coefficient;
  return s;
}

enum class HamiltonianKind { chain, quadratic, cubic };

inline std::string to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::chain:
      return "chain";
    case HamiltonianKind::quadratic:
      return "quadratic";
    case HamiltonianKind::cubic:
      return "cubic";
  }
  return "?";
}

inline HamiltonianKind parse_hamiltonian_kind(std::string_view name) {
  if (name == "chain") return HamiltonianKind::chain;
  if (name == "quadratic") return HamiltonianKind::quadratic;
  if (name == "cubic") return HamiltonianKind::cubic;
  throw ConfigError("unknown hamiltonian kind \"" + std::string(name) +
                    "\" (expected chain, quadratic or cubic)");
}

/// On-site frequencies drawn uniformly from [-1, 1].
inline std::vector<double> random_onsite_frequencies(int n, std::uint64_t seed) {
  CounterRng rng(seed, "omega", static_cast<std::uint64_t>(n));
  std::vector<double> omega(static_cast<std::size_t>(n));
  for (auto& w : omega) w = rng.uniform(-1.0, 1.0);
  return omega;
}

/// Benchmark spin Hamiltonians:
///  chain      J sum_i (XX + YY + ZZ) on (i, i+1), periodic wrap (N, 1)
///  quadratic  J sum_{k>l} (XX + YY + ZZ) on (l, k), all pairs
///  cubic      J sum_{k<l<m} X_k Y_l Z_m
/// each plus sum_i omega_i Z_i.
inline PauliSum build_hamiltonian(HamiltonianKind kind, int n, double j,
                                  const std::vector<double>& omega) {
  const int min_n = kind == HamiltonianKind::cubic ? 3 : 2;
  if (n < min_n) {
    throw InvariantError(to_string(kind) + " Hamiltonian needs at least " +
                         std::to_string(min_n) + " qubits, got " + std::to_string(n));
  }
  if (omega.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("omega has " + std::to_string(omega.size()) + " entries, expected " +
                         std::to_string(n));
  }
  std::vector<PauliTerm> terms;
  auto heisenberg = [&](int a, int b) {
    for (char axis : {'X', 'Y', 'Z'}) terms.push_back({PauliString::on(n, {{a, axis}, {b, axis}}), j});
  };
  switch (kind) {
    case HamiltonianKind::chain:
      for (int i = 0; i + 1 < n; ++i) heisenberg(i, i + 1);
      heisenberg(0, n - 1);
      break;
    case HamiltonianKind::quadratic:
      for (int l = 0; l < n; ++l)
        for (int k = l + 1; k < n; ++k) heisenberg(l, k);
      break;
    case HamiltonianKind::cubic:
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
          for (int m = l + 1; m < n; ++m)
            terms.push_back({PauliString::on(n, {{k, 'X'}, {l, 'Y'}, {m, 'Z'}}), j});
      break;
  }
  for (int i = 0; i < n; ++i) terms.push_back({PauliString::on(n, {{i, 'Z'}}), omega[static_cast<std::size_t>(i)]});
  return PauliSum(n, terms);
}

inline PauliSum build_hamiltonian(HamiltonianKind kind, int n, double j, std::uint64_t omega_seed) {
  return build_hamiltonian(kind, n, j, random_onsite_frequencies(n, omega_seed));
}

/// True when a and b act with equal axes or identity on every qubit.
inline bool qubitwise_commute(const PauliString& a, const PauliString& b) {
  for (int q = 0; q < a.qubit_count(); ++q) {
    if (a[q] != 'I' && b[q] != 'I' && a[q] != b[q]) return false;
  }
  return true;
}

/// Greedy first-fit partition of term indices into qubit-wise commuting
/// groups, visiting terms in canonical order.
inline std::vector<std::vector<std::size_t>> qubitwise_commuting_groups(const PauliSum& h) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::string> signatures;
  for (std::size_t t = 0; t < h.size(); ++t) {
    const std::string& axes = h[t].string.axes();
    bool placed = false;
    for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
      std::string& sig = signatures[g];
      bool ok = true;
      for (std::size_t q = 0; q < axes.size() && ok; ++q) {
        ok = axes[q] == 'I' || sig[q] == 'I' || sig[q] == axes[q];
      }
      if (ok) {
        for (std::size_t q = 0; q < axes.size(); ++q)
          if (axes[q] != 'I') sig[q] = axes[q];
        groups[g].push_back(t);
        placed = true;
      }
    }
    if (!placed) {
      groups.push_back({t});
      signatures.push_back(axes);
    }
  }
  return groups;
}

enum class Grouping { per_term, qubitwise };

inline Grouping parse_grouping(std::string_view name) {
  if (name == "per_term") return Grouping::per_term;
  if (name == "qubitwise") return Grouping::qubitwise;
  throw ConfigError("unknown grouping \"" + std::string(name) + "\" (expected per_term or qubitwise)");
}

/// Reported measurement-setup factor f_g: the number of separately measured
/// groups under the chosen strategy.
inline double gradient_setup_factor(const PauliSum& h, Grouping grouping) {
  if (grouping == Grouping::per_term) return static_cast<double>(h.size());
  return static_cast<double>(qubitwise_commuting_groups(h).size());
}

/// Line-oriented text form, one "<coeff> <axes>" per line.
inline std::string to_text(const PauliSum& h) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& t : h.terms()) out << t.coefficient << ' ' << t.string.axes() << '\n';
  return out.str();
}

/// Parses the text form; blank lines and lines starting with '#' are skipped.
inline PauliSum pauli_sum_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<PauliTerm> terms;
  int n = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double c = 0.0;
    std::string axes, extra;
    if (!(fields >> c >> axes) || (fields >> extra)) {
      throw InvariantError("line " + std::to_string(line_no) + ": expected \"<coeff> <axes>\"");
    }
    if (n < 0) n = static_cast<int>(axes.size());
    terms.push_back({PauliString(axes), c});
  }
  if (n < 0) throw InvariantError("no Pauli terms found");
  return PauliSum(n, terms);
}

}  // namespace shotcost

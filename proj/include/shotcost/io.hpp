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
#include <cstdio>
#include <cstdlib>
#include <type_traits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "shotcost/allocation.hpp"
#include "shotcost/ansatz.hpp"
#include "shotcost/estimator.hpp"
#include "shotcost/evolution.hpp"
#include "shotcost/pauli.hpp"
#include "shotcost/shot_model.hpp"

namespace shotcost {

using json = nlohmann::ordered_json;

/// Shortest round-tripping decimal form; "nan"/"inf" for non-finite values.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// JSON number, or null when not finite.
inline json number_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json matrix_json(const ShotMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Vec>
json vector_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_floating_point_v<typename Vec::Scalar>) {
      out.push_back(number_json(v[i]));
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

// Hamiltonian: {"n": N, "terms": [{"c": coeff, "p": "XXII"}, ...]}
inline json to_json(const PauliSum& h) {
  json terms = json::array();
  for (const auto& t : h.terms()) terms.push_back({{"c", t.coefficient}, {"p", t.string.axes()}});
  return {{"n", h.qubit_count()}, {"terms", std::move(terms)}};
}

inline PauliSum pauli_sum_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back({PauliString(t.at("p").get<std::string>()), t.at("c").get<double>()});
  }
  return PauliSum(n, terms);
}

// Ansatz: {"n": N, "gates": [{"p": "ZZII", "idx": 1}, ...]}, idx one-based.
inline json to_json(const AnsatzCircuit& c) {
  json gates = json::array();
  for (const auto& g : c.gates()) gates.push_back({{"p", g.generator.axes()}, {"idx", g.parameter_index + 1}});
  return {{"n", c.qubit_count()}, {"gates", std::move(gates)}};
}

inline AnsatzCircuit ansatz_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<GateSpec> gates;
  for (const auto& g : j.at("gates")) {
    gates.push_back({PauliString(g.at("p").get<std::string>()), g.at("idx").get<int>() - 1});
  }
  return AnsatzCircuit(n, std::move(gates));
}

inline json to_json(const MetricEstimate& m) {
  return {{"protocol", to_string(m.protocol)},
          {"nu", m.parameter_count()},
          {"energy", m.energy},
          {"fisher", matrix_json(m.fisher)},
          {"grad", vector_json(m.grad)},
          {"var_fisher", matrix_json(m.var_fisher)},
          {"var_grad", vector_json(m.var_grad)},
          {"A", matrix_json(m.components.a)},
          {"B", vector_json(m.components.b)},
          {"C", vector_json(m.components.c)},
          {"M", matrix_json(m.gradient_elements)}};
}

inline json to_json(const AllocationPlan& p) {
  return {{"mode", to_string(p.mode)},
          {"total", p.total},
          {"continuous_total", p.continuous_total},
          {"predicted_eps2", p.predicted_eps2},
          {"fisher_shots", matrix_json(p.fisher_shots)},
          {"grad_shots", vector_json(p.grad_shots)},
          {"fisher_continuous", matrix_json(p.fisher_continuous)},
          {"grad_continuous", vector_json(p.grad_continuous)}};
}

inline json to_json(const ShotBoundReport& r) {
  return {{"n_f_exact", r.n_f_exact},
          {"n_f_bound", r.n_f_bound},
          {"n_f_ok", r.f_ok()},
          {"n_g_exact", r.n_g_exact},
          {"n_g_bound", r.n_g_bound},
          {"n_g_ok", r.g_ok()}};
}

inline json to_json(const OverheadReport& r) {
  return {{"kappa", r.kappa},
          {"kappa_optimal", r.kappa_optimal},
          {"kappa_approx", r.kappa_approx},
          {"kappa_bound", r.kappa_bound},
          {"kappa_ok", r.kappa_ok()},
          {"n_f", r.n_f},
          {"n_g", r.n_g},
          {"n_opt", r.n_opt},
          {"n_smpl", r.n_smpl},
          {"n_f_bound", r.n_f_bound},
          {"n_g_bound", r.n_g_bound},
          {"spc_inv", r.spc_inv},
          {"y", r.y},
          {"grad_ratio", r.grad_ratio},
          {"grad_ratio_bound", r.grad_ratio_bound},
          {"grad_ratio_ok", r.grad_ratio_ok()}};
}

inline json to_json(const EmpiricalEpsilon& e) {
  return {{"predicted_eps2", e.predicted},
          {"empirical_eps2", e.mean},
          {"stderr", e.standard_error},
          {"trials", e.trials},
          {"seed", e.seed},
          {"small_error_regime", e.small_error_regime}};
}

inline std::string trace_csv(const EvolutionTrace& trace) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',' << format_number(r.energy) << ',' << format_number(r.grad_norm) << ','
        << format_number(r.natgrad_norm) << ',' << format_number(r.kappa_uniform) << ','
        << format_number(r.kappa_optimal) << ',' << format_number(r.n_f) << ','
        << format_number(r.n_g) << ',' << format_number(r.n_opt) << ','
        << format_number(r.spc_inv) << '\n';
  }
  return out.str();
}

inline std::string scan_csv(const ScanTable& table) {
  std::ostringstream out;
  out << "n,instance,ratio\n";
  for (const auto& r : table.rows) {
    if (!r.converged) continue;
    out << r.n << ',' << r.instance << ',' << format_number(r.ratio) << '\n';
  }
  return out.str();
}

inline std::string scan_aggregate_csv(const ScanTable& table) {
  std::ostringstream out;
  out << "n,mean,std,count,excluded\n";
  for (const auto& a : table.aggregate) {
    out << a.n << ',' << format_number(a.mean) << ',' << format_number(a.std) << ',' << a.count
        << ',' << a.excluded << '\n';
  }
  return out.str();
}

}  // namespace shotcost

// Copyright 2026 The qnmr Authors
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

// Per-gate noise description.
//
// File format, one directive per line, '#' comments:
//
//   CNOT 2 0.0075 3.0e-7     kind, arity, error probability, gate time in s (optional)
//   SX   1 0.0003 3.5e-8
//   coherent_z -0.027         Rz after every non-virtual gate, on each of its qubits
//   coherent_2q 0.05 -0.047 -0.05   after CNOT: Rx control, Rx target, Rz control
//   seed 7

#ifndef QNMR_NOISE_MODEL_HPP
#define QNMR_NOISE_MODEL_HPP

#include "qnmr/circuit.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>

namespace qnmr {

struct CoherentTwoQubitError {
  double rx_control = 0.0;
  double rx_target = 0.0;
  double rz_control = 0.0;

  friend bool operator==(const CoherentTwoQubitError&, const CoherentTwoQubitError&) = default;
};

struct NoiseModel {
  std::map<GateKind, double> gate_error;  // average gate infidelity epsilon
  std::map<GateKind, double> gate_time;   // seconds
  std::optional<double> coherent_z;
  std::optional<CoherentTwoQubitError> coherent_2q;
  std::uint64_t seed = 0;

  double error(GateKind kind) const {
    auto it = gate_error.find(kind);
    return it == gate_error.end() ? 0.0 : it->second;
  }

  std::optional<double> time(GateKind kind) const {
    auto it = gate_time.find(kind);
    if (it == gate_time.end()) return std::nullopt;
    return it->second;
  }

  bool is_noiseless() const {
    for (const auto& [k, e] : gate_error) {
      if (e != 0.0) return false;
    }
    return !coherent_z && !coherent_2q;
  }

  void validate() const {
    for (const auto& [k, e] : gate_error) {
      require(std::isfinite(e) && e >= 0.0 && e < 1.0,
              "error probability for " + gate_name(k) + " must lie in [0, 1), got " + format_number(e));
    }
    for (const auto& [k, t] : gate_time) {
      require(std::isfinite(t) && t >= 0.0, "gate time for " + gate_name(k) + " must be >= 0");
    }
    if (coherent_z) require(std::isfinite(*coherent_z), "coherent_z must be finite");
    if (coherent_2q) {
      require(std::isfinite(coherent_2q->rx_control) && std::isfinite(coherent_2q->rx_target) &&
                  std::isfinite(coherent_2q->rz_control),
              "coherent_2q angles must be finite");
    }
  }

  /// Depolarizing only: eps_2q on CNOT, eps_1q on X and SX, nothing on the virtual Rz.
  static NoiseModel depolarizing(double eps_2q, double eps_1q) {
    NoiseModel m;
    m.gate_error[GateKind::kCnot] = eps_2q;
    m.gate_error[GateKind::kX] = eps_1q;
    m.gate_error[GateKind::kSqrtX] = eps_1q;
    m.validate();
    return m;
  }

  /// Coherent over-rotations of the discrete emulation model.
  static NoiseModel with_default_coherent(NoiseModel base) {
    base.coherent_z = -0.027;
    base.coherent_2q = CoherentTwoQubitError{0.05, -0.047, -0.05};
    return base;
  }
};

inline NoiseModel parse_noise_model(std::istream& in) {
  NoiseModel model;
  int line_no = 0;
  int directives = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string where = "noise line " + std::to_string(line_no);
    auto tokens = detail::split_ws(detail::strip_comment(raw));
    if (tokens.empty()) continue;
    ++directives;
    const std::string& key = tokens[0];
    if (key == "coherent_z") {
      require(tokens.size() == 2, "coherent_z takes one angle at " + where);
      model.coherent_z = detail::parse_double(tokens[1], where);
    } else if (key == "coherent_2q") {
      require(tokens.size() == 4, "coherent_2q takes three angles at " + where);
      model.coherent_2q = CoherentTwoQubitError{detail::parse_double(tokens[1], where),
                                                detail::parse_double(tokens[2], where),
                                                detail::parse_double(tokens[3], where)};
    } else if (key == "seed") {
      require(tokens.size() == 2, "seed takes one integer at " + where);
      model.seed = detail::parse_uint64(tokens[1], where);
    } else {
      auto kind = parse_gate_kind(key);
      require(kind.has_value(), "unknown gate kind '" + key + "' at " + where);
      require(*kind != GateKind::kSwap, "SWAP is compiled to CNOTs; give CNOT errors instead (" + where + ")");
      require(tokens.size() == 3 || tokens.size() == 4, "expected 'KIND arity eps [t_gate]' at " + where);
      const double arity = detail::parse_double(tokens[1], where);
      require(arity == gate_arity(*kind), "arity of " + key + " must be " + std::to_string(gate_arity(*kind)) +
                                              " at " + where);
      const double eps = detail::parse_double(tokens[2], where);
      require(std::isfinite(eps) && eps >= 0.0 && eps < 1.0,
              "error probability must lie in [0, 1) at " + where);
      model.gate_error[*kind] = eps;
      if (tokens.size() == 4) model.gate_time[*kind] = detail::parse_double(tokens[3], where);
    }
  }
  require(directives > 0, "noise model file is empty");
  model.validate();
  return model;
}

inline NoiseModel load_noise_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise model file " + path);
  return parse_noise_model(in);
}

inline void write_noise_model(std::ostream& out, const NoiseModel& model) {
  for (const auto& [kind, eps] : model.gate_error) {
    out << gate_name(kind) << ' ' << gate_arity(kind) << ' ' << format_number(eps);
    if (auto t = model.time(kind)) out << ' ' << format_number(*t);
    out << '\n';
  }
  if (model.coherent_z) out << "coherent_z " << format_number(*model.coherent_z) << '\n';
  if (model.coherent_2q) {
    out << "coherent_2q " << format_number(model.coherent_2q->rx_control) << ' '
        << format_number(model.coherent_2q->rx_target) << ' ' << format_number(model.coherent_2q->rz_control)
        << '\n';
  }
  out << "seed " << model.seed << '\n';
}

}  // namespace qnmr

#endif  // QNMR_NOISE_MODEL_HPP

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

// Effective decoherence rate from per-gate error probabilities.
//
//   Gamma_eff = sum_kl eps_kl / (N tau)
//
// with the sum running over the gates of one Trotter step. Spectral widths use the Lorentzian
// convention FWHM = 2 Gamma in angular frequency.

#ifndef QNMR_NOISE_BUDGET_HPP
#define QNMR_NOISE_BUDGET_HPP

#include "qnmr/circuit.hpp"
#include "qnmr/noise_model.hpp"
#include "qnmr/spin_system.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace qnmr {

struct BudgetEntry {
  GateKind kind = GateKind::kCnot;
  std::vector<int> qubits;
  double epsilon = 0.0;
  std::optional<double> t_gate;
  std::string origin;
};

struct ErrorBudget {
  std::vector<BudgetEntry> entries;
  int n_spins = 0;
  double tau = 0.0;

  void validate() const {
    require(n_spins >= 1, "budget needs n_spins >= 1");
    require(std::isfinite(tau) && tau > 0, "budget needs tau > 0");
    for (const auto& e : entries) {
      require(std::isfinite(e.epsilon) && e.epsilon >= 0.0 && e.epsilon < 1.0, "budget epsilon must lie in [0, 1)");
      require(!e.qubits.empty(), "budget entry without qubits");
      if (e.t_gate) require(std::isfinite(*e.t_gate) && *e.t_gate > 0, "gate time must be > 0");
    }
  }

  double error_sum() const {
    double total = 0.0;
    for (const auto& e : entries) total += e.epsilon;
    return total;
  }
};

inline double gamma_eff(const ErrorBudget& budget, std::vector<std::string>* warnings = nullptr) {
  budget.validate();
  if (budget.entries.empty() && warnings) warnings->push_back("error budget has no entries; Gamma_eff = 0");
  return budget.error_sum() / (budget.n_spins * budget.tau);
}

/// 2 Gamma / (2 pi nu0 1e-6).
inline double linewidth_ppm(double gamma, const MoleculeSpec& spec) {
  require(std::isfinite(gamma) && gamma >= 0, "gamma must be >= 0");
  return 2.0 * gamma / (2 * kPi * larmor_frequency_hz(spec) * 1e-6);
}

/// Pairs whose angular coupling |2 pi J| lies below Gamma_eff. Advice only.
inline std::vector<PairTerm> reduction_advice(const ErrorBudget& budget, const HamiltonianTerms& terms) {
  require(budget.n_spins == terms.n_spins, "budget and Hamiltonian describe different spin counts");
  const double g = gamma_eff(budget);
  std::vector<PairTerm> flagged;
  for (const auto& p : terms.pairs) {
    if (std::abs(p.coupling) < g) flagged.push_back(p);
  }
  return flagged;
}

/// One entry per physical gate of the step (SWAP expands to three CNOTs). Virtual Rz gates
/// only enter when the model gives them a nonzero error.
inline ErrorBudget budget_from_circuit(const Circuit& step, const NoiseModel& model, int n_spins, double tau) {
  model.validate();
  ErrorBudget budget;
  budget.n_spins = n_spins;
  budget.tau = tau;
  auto add = [&](GateKind kind, std::vector<int> qubits, const std::string& origin) {
    if (is_virtual(kind) && model.error(kind) == 0.0) return;
    budget.entries.push_back({kind, std::move(qubits), model.error(kind), model.time(kind), origin});
  };
  for (const auto& g : step.gates) {
    if (g.kind == GateKind::kSwap) {
      for (int k = 0; k < 3; ++k) add(GateKind::kCnot, {g.qubits[k % 2], g.qubits[1 - k % 2]}, g.origin);
    } else {
      add(g.kind, std::vector<int>(g.targets().begin(), g.targets().end()), g.origin);
    }
  }
  budget.validate();
  return budget;
}

/// Calibration file (noise-model format) joined to the gate census of `step`.
inline ErrorBudget ingest_calibration(const std::string& path, const Circuit& step, int n_spins, double tau) {
  return budget_from_circuit(step, load_noise_model(path), n_spins, tau);
}

// Rate bridge between error probabilities and depolarizing decay rates:
//   eps = 3d / (4(d+1)) t_gate sum_i gamma_i,   d = 2^n,
// and the step rescaling gamma~ tau = gamma t_gate.

inline double error_rate_prefactor(int n_qubits) {
  const double d = static_cast<double>(dimension_of(n_qubits));
  return 3.0 * d / (4.0 * (d + 1.0));
}

/// Per-qubit gamma for a gate whose n qubits share one rate.
inline double decay_rate_from_error(double epsilon, int n_qubits, double t_gate) {
  require(t_gate > 0, "gate time must be > 0");
  return epsilon / (error_rate_prefactor(n_qubits) * t_gate * n_qubits);
}

inline double error_from_decay_rates(const std::vector<double>& gammas, double t_gate) {
  double sum = 0.0;
  for (double g : gammas) sum += g;
  return error_rate_prefactor(static_cast<int>(gammas.size())) * t_gate * sum;
}

/// sum over entries and qubits of the rescaled rates gamma~ = gamma t_gate / tau.
/// Gate times default to `default_t_gate`; the result does not depend on them.
inline double rescaled_rate_sum(const ErrorBudget& budget, double default_t_gate = 1e-7) {
  double total = 0.0;
  for (const auto& e : budget.entries) {
    const int n = static_cast<int>(e.qubits.size());
    const double t = e.t_gate.value_or(default_t_gate);
    total += n * decay_rate_from_error(e.epsilon, n, t) * t / budget.tau;
  }
  return total;
}

/// tau/2 sum gamma~: the simplified-prefactor estimate of sum eps.
inline double simplified_error_sum(const ErrorBudget& budget) { return 0.5 * budget.tau * rescaled_rate_sum(budget); }

inline nlohmann::ordered_json budget_report_json(const ErrorBudget& budget, const MoleculeSpec& spec,
                                                 const HamiltonianTerms& terms) {
  std::vector<std::string> warnings;
  const double g = gamma_eff(budget, &warnings);
  nlohmann::ordered_json j;
  j["n_spins"] = budget.n_spins;
  j["tau_s"] = budget.tau;
  j["n_entries"] = budget.entries.size();
  j["error_sum"] = budget.error_sum();
  j["gamma_eff_s_inv"] = g;
  j["fwhm_ppm"] = linewidth_ppm(g, spec);
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& e : budget.entries) counts[gate_name(e.kind)] = counts.value(gate_name(e.kind), 0) + 1;
  j["gate_counts"] = counts;
  nlohmann::ordered_json flagged = nlohmann::ordered_json::array();
  for (const auto& p : reduction_advice(budget, terms)) {
    flagged.push_back({{"i", p.i}, {"j", p.j}, {"coupling_rad_s", p.coupling}, {"coupling_hz", p.coupling / (2 * kPi)}});
  }
  j["flagged_couplings"] = flagged;
  j["warnings"] = warnings;
  return j;
}

}  // namespace qnmr

#endif  // QNMR_NOISE_BUDGET_HPP

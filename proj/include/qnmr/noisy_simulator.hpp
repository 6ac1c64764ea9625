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

// Noisy Trotter evolution of magnetization sectors.
//
// Every gate is followed by its coherent over-rotations (if configured) and then by a
// depolarizing channel on the gate's qubits. C_{z/y}(t) is assembled from sector runs that
// start in basis states |m> with m0 > 0.

#ifndef QNMR_NOISY_SIMULATOR_HPP
#define QNMR_NOISY_SIMULATOR_HPP

#include "qnmr/correlation.hpp"
#include "qnmr/density_matrix.hpp"
#include "qnmr/noise_model.hpp"

#include <future>
#include <random>
#include <set>

namespace qnmr {

inline void apply_gate_with_noise(DensityMatrix& rho, const Gate& gate, const NoiseModel& model) {
  if (gate.kind == GateKind::kSwap) {
    const int a = gate.qubits[0], b = gate.qubits[1];
    for (const Gate& g : {Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)}) apply_gate_with_noise(rho, g, model);
    return;
  }
  apply_unitary(rho, gate_matrix(gate), gate.targets());
  if (!is_virtual(gate.kind)) {
    if (model.coherent_z) {
      for (int q : gate.targets()) apply_unitary(rho, rz_matrix(*model.coherent_z), q);
    }
    if (gate.kind == GateKind::kCnot && model.coherent_2q) {
      const auto& e = *model.coherent_2q;
      apply_unitary(rho, rx_matrix(e.rx_control), gate.qubits[0]);
      apply_unitary(rho, rx_matrix(e.rx_target), gate.qubits[1]);
      apply_unitary(rho, rz_matrix(e.rz_control), gate.qubits[0]);
    }
  }
  const double eps = model.error(gate.kind);
  if (eps > 0.0) depolarize(rho, depolarizing_probability(eps, gate.arity()), gate.targets());
}

enum class ReadoutMode { kExpectation, kShots };

struct SimulationOptions {
  ReadoutMode mode = ReadoutMode::kExpectation;
  int shots = 4096;
  bool parallel = true;
  /// Noiseless expectation runs multiply by the precomputed step unitary instead of gate by gate.
  bool fuse_noiseless = true;
};

namespace detail {

/// Readout of the spin-frame S^z_tot / S^y_tot in the circuit frame: Pauli axis and sign.
struct Readout {
  Axis axis;
  double sign;
};

inline Readout readout_for(Axis spin_axis, bool hadamard_frame) {
  if (!hadamard_frame) return {spin_axis, 1.0};
  // W S^z W = S^x, W S^y W = -S^y.
  return spin_axis == Axis::kZ ? Readout{Axis::kX, 1.0} : Readout{Axis::kY, -1.0};
}

/// Native gates rotating `axis` onto Z on every qubit (H = Rz(pi/2) SX Rz(pi/2); S^dag H for Y).
inline std::vector<Gate> readout_rotation(Axis axis, int width) {
  std::vector<Gate> gates;
  for (int q = 0; q < width; ++q) {
    if (axis == Axis::kX) {
      gates.push_back(Gate::rz(q, kPi / 2, "readout"));
      gates.push_back(Gate::sx(q, "readout"));
      gates.push_back(Gate::rz(q, kPi / 2, "readout"));
    } else if (axis == Axis::kY) {
      gates.push_back(Gate::sx(q, "readout"));
      gates.push_back(Gate::rz(q, kPi / 2, "readout"));
    }
  }
  return gates;
}

inline DensityMatrix sector_initial_state(const Circuit& step, std::uint64_t basis_state) {
  const int n = step.width;
  DensityMatrix rho = basis_density(physical_index(basis_state, step.layout_in), n);
  if (step.hadamard_frame) {
    Matrix2 h;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    for (int q = 0; q < n; ++q) apply_unitary(rho, h, q);
  }
  return rho;
}

inline double sample_total_z(const DensityMatrix& rotated, int width, int shots, std::mt19937_64& rng) {
  const auto dim = static_cast<std::size_t>(rotated.rows());
  std::vector<double> probs(dim);
  for (std::size_t i = 0; i < dim; ++i) probs[i] = std::max(0.0, rotated(i, i).real());
  std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
  double total = 0.0;
  for (int s = 0; s < shots; ++s) total += basis_magnetization(dist(rng), width);
  return total / shots;
}

}  // namespace detail

/// Per-step <S^z_tot>, <S^y_tot> (spin frame) for the initial basis state `basis_state`,
/// at steps k = 0..n_steps.
inline SectorSeries run_sector(const Circuit& step, int n_steps, std::uint64_t basis_state, const NoiseModel& model,
                               const SimulationOptions& options = {}, std::uint64_t stream = 0) {
  step.validate();
  model.validate();
  require(n_steps >= 0, "n_steps must be >= 0");
  require(step.layout_restored(), "Trotter step must restore its qubit layout");
  const int n = step.width;
  check_dense_size(n);
  require(basis_state < dimension_of(n), "basis state out of range");
  const double m0 = basis_magnetization(basis_state, n);
  require(m0 > 0, "sector needs positive initial magnetization, got m0 = " + format_number(m0));
  require(options.mode != ReadoutMode::kShots || options.shots > 0, "shot count must be positive");

  const auto rz = detail::readout_for(Axis::kZ, step.hadamard_frame);
  const auto ry = detail::readout_for(Axis::kY, step.hadamard_frame);
  const DenseOperator obs_z = rz.sign * total_spin(rz.axis, n);
  const DenseOperator obs_y = ry.sign * total_spin(ry.axis, n);
  const auto rot_z = detail::readout_rotation(rz.axis, n);
  const auto rot_y = detail::readout_rotation(ry.axis, n);

  std::seed_seq seq{static_cast<std::uint32_t>(model.seed), static_cast<std::uint32_t>(model.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);

  SectorSeries series{basis_state, m0, {}, {}};
  series.sz.reserve(n_steps + 1);
  series.sy.reserve(n_steps + 1);
  auto record = [&](const DensityMatrix& rho) {
    if (options.mode == ReadoutMode::kExpectation) {
      series.sz.push_back(expectation(rho, obs_z));
      series.sy.push_back(expectation(rho, obs_y));
      return;
    }
    for (auto [rot, readout, out] : {std::tuple{&rot_z, rz, &series.sz}, std::tuple{&rot_y, ry, &series.sy}}) {
      DensityMatrix measured = rho;
      for (const auto& g : *rot) apply_gate_with_noise(measured, g, model);
      out->push_back(readout.sign * detail::sample_total_z(measured, n, options.shots, rng));
    }
  };

  DensityMatrix rho = detail::sector_initial_state(step, basis_state);
  record(rho);
  const bool fused = options.fuse_noiseless && options.mode == ReadoutMode::kExpectation && model.is_noiseless();
  const DenseOperator u = fused ? physical_unitary(step) : DenseOperator();
  for (int k = 0; k < n_steps; ++k) {
    if (fused) {
      rho = (u * rho * u.adjoint()).eval();
    } else {
      for (const auto& g : step.gates) apply_gate_with_noise(rho, g, model);
    }
    record(rho);
  }
  return series;
}

/// C_{z/y}(t_k) = 2 sum_{m0 > 0} m0 <S^{z/y}_tot>_m(t_k).
inline CorrelationRecord assemble_correlations(std::vector<SectorSeries> sectors, int n_spins, double tau) {
  check_dense_size(n_spins);
  require(!sectors.empty(), "no sector series to assemble");
  std::set<std::uint64_t> seen;
  const std::size_t len = sectors.front().sz.size();
  for (const auto& s : sectors) {
    require(s.m0 > 0, "sector with non-positive magnetization");
    require(s.m0 == basis_magnetization(s.basis_state, n_spins), "sector magnetization does not match its state");
    require(seen.insert(s.basis_state).second, "duplicate sector " + std::to_string(s.basis_state));
    require(s.sz.size() == len && s.sy.size() == len, "sector series lengths differ");
  }
  for (std::uint64_t m = 0; m < dimension_of(n_spins); ++m) {
    if (basis_magnetization(m, n_spins) > 0 && !seen.count(m)) {
      throw ConfigError("missing sector for basis state " + std::to_string(m));
    }
  }
  std::sort(sectors.begin(), sectors.end(),
            [](const SectorSeries& a, const SectorSeries& b) { return a.basis_state < b.basis_state; });
  CorrelationRecord r;
  r.n_spins = n_spins;
  r.tau = tau;
  r.times = uniform_grid(len, tau);
  r.cz.assign(len, 0.0);
  r.cy.assign(len, 0.0);
  r.n_measured = len;
  for (const auto& s : sectors) {
    for (std::size_t k = 0; k < len; ++k) {
      r.cz[k] += 2 * s.m0 * s.sz[k];
      r.cy[k] += 2 * s.m0 * s.sy[k];
    }
  }
  r.per_sector = std::move(sectors);
  return r;
}

inline std::vector<std::uint64_t> positive_sectors(int n_spins) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < dimension_of(n_spins); ++m) {
    if (basis_magnetization(m, n_spins) > 0) out.push_back(m);
  }
  return out;
}

/// All positive sectors, independent jobs; results do not depend on scheduling.
inline CorrelationRecord simulate_correlations(const Circuit& step, int n_steps, double tau, const NoiseModel& model,
                                               const SimulationOptions& options = {}) {
  require(std::isfinite(tau) && tau > 0, "tau must be > 0");
  const auto sectors = positive_sectors(step.width);
  std::vector<SectorSeries> results(sectors.size());
  if (options.parallel && sectors.size() > 1) {
    std::vector<std::future<SectorSeries>> jobs;
    for (std::size_t i = 0; i < sectors.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return run_sector(step, n_steps, sectors[i], model, options, i);
      }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < sectors.size(); ++i) results[i] = run_sector(step, n_steps, sectors[i], model, options, i);
  }
  return assemble_correlations(std::move(results), step.width, tau);
}

}  // namespace qnmr

#endif  // QNMR_NOISY_SIMULATOR_HPP

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

// Experiment runner: one configuration in, a directory of data files out.

#ifndef QNMR_RUNNER_HPP
#define QNMR_RUNNER_HPP

#include "qnmr/exact_reference.hpp"
#include "qnmr/lindblad.hpp"
#include "qnmr/molecule_io.hpp"
#include "qnmr/noise_budget.hpp"
#include "qnmr/noisy_simulator.hpp"
#include "qnmr/spectrum.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace qnmr {

enum class RunMode { kExact, kTrotterNoiseless, kTrotterNoisy, kBudget, kLindblad };

inline std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::kExact: return "exact";
    case RunMode::kTrotterNoiseless: return "trotter-noiseless";
    case RunMode::kTrotterNoisy: return "trotter-noisy";
    case RunMode::kBudget: return "budget";
    case RunMode::kLindblad: return "lindblad";
  }
  return "?";
}

inline std::optional<RunMode> parse_mode(const std::string& name) {
  for (RunMode m : {RunMode::kExact, RunMode::kTrotterNoiseless, RunMode::kTrotterNoisy, RunMode::kBudget,
                    RunMode::kLindblad}) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

inline constexpr const char* kOutputDirEnv = "QNMR_OUTPUT_DIR";

struct RunConfig {
  std::string molecule_path;
  RunMode mode = RunMode::kTrotterNoiseless;
  double tau = 0.01;
  int n_steps = 81;
  int order = 2;
  Topology topology = Topology::kAllToAll;
  std::string noise_path;  // trotter-noisy and budget; lindblad builds its model from it unless gamma_path is set
  std::string gamma_path;  // lindblad rate-matrix file
  std::optional<double> gamma_window;  // s^-1; mandatory in exact mode, 0 otherwise
  std::size_t padding = 0;             // padded length, 0 selects the default
  bool symmetrize = false;
  std::string output_dir;              // empty: $QNMR_OUTPUT_DIR
  std::optional<std::uint64_t> seed;   // overrides the noise file
  ReadoutMode readout = ReadoutMode::kExpectation;
  int shots = 4096;
  double reduce_below_hz = 0.0;        // drop couplings with |J| below this before building circuits

  std::string resolved_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    const char* env = std::getenv(kOutputDirEnv);
    return env ? std::string(env) : std::string();
  }
};

/// Human-readable problems; empty means runnable. Never throws.
inline std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> d;
  if (c.molecule_path.empty()) {
    d.push_back("molecule file is required");
  } else {
    try {
      load_molecule(c.molecule_path);
    } catch (const Error& e) {
      d.push_back(std::string("molecule: ") + e.what());
    }
  }
  if (!(std::isfinite(c.tau) && c.tau > 0)) d.push_back("tau must be > 0");
  if (c.n_steps < 1) d.push_back("n_steps must be >= 1");
  if (c.order != 1 && c.order != 2) d.push_back("Trotter order must be 1 or 2");
  if (c.gamma_window && !(std::isfinite(*c.gamma_window) && *c.gamma_window >= 0)) {
    d.push_back("gamma window must be >= 0");
  }
  if (c.mode == RunMode::kExact && !c.gamma_window) d.push_back("exact mode needs an explicit gamma window");
  const bool needs_noise = c.mode == RunMode::kTrotterNoisy || c.mode == RunMode::kBudget ||
                           (c.mode == RunMode::kLindblad && c.gamma_path.empty());
  if (needs_noise && c.noise_path.empty()) {
    d.push_back(mode_name(c.mode) + " mode needs a noise model file");
  } else if (!c.noise_path.empty()) {
    try {
      load_noise_model(c.noise_path);
    } catch (const Error& e) {
      d.push_back(std::string("noise model: ") + e.what());
    }
  }
  if (!c.gamma_path.empty()) {
    if (c.mode != RunMode::kLindblad) d.push_back("a rate-matrix file is only used in lindblad mode");
    try {
      load_gamma_matrix(c.gamma_path);
    } catch (const Error& e) {
      d.push_back(std::string("rate matrix: ") + e.what());
    }
  }
  if (c.padding != 0 && c.padding < static_cast<std::size_t>(std::max(c.n_steps, 0)) + 1) {
    d.push_back("padding must be at least n_steps + 1");
  }
  if (c.readout == ReadoutMode::kShots && c.shots < 1) d.push_back("shots must be >= 1");
  if (!(std::isfinite(c.reduce_below_hz) && c.reduce_below_hz >= 0)) d.push_back("reduction threshold must be >= 0");
  if (c.resolved_output_dir().empty()) {
    d.push_back(std::string("output directory is required (flag or $") + kOutputDirEnv + ")");
  }
  return d;
}

struct RunResult {
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json manifest;
};

namespace detail {

inline nlohmann::ordered_json molecule_json(const MoleculeSpec& spec, const FrameConfig& frame) {
  nlohmann::ordered_json j;
  j["name"] = spec.name();
  j["shifts_ppm"] = spec.shifts_ppm();
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < spec.n_spins(); ++i) {
    rows.emplace_back();
    for (int k = 0; k < spec.n_spins(); ++k) rows.back().push_back(spec.couplings_hz()(i, k));
  }
  j["couplings_hz"] = rows;
  j["field_tesla"] = spec.field_tesla();
  j["gyromagnetic_ratio"] = spec.gyromagnetic_ratio();
  j["reference_ppm"] = frame.reference_ppm;
  j["larmor_hz"] = frame.larmor_hz;
  return j;
}

inline nlohmann::ordered_json noise_json(const NoiseModel& m) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json err = nlohmann::ordered_json::object(), time = nlohmann::ordered_json::object();
  for (const auto& [k, e] : m.gate_error) err[gate_name(k)] = e;
  for (const auto& [k, t] : m.gate_time) time[gate_name(k)] = t;
  j["gate_error"] = err;
  j["gate_time_s"] = time;
  j["coherent_z"] = m.coherent_z ? nlohmann::ordered_json(*m.coherent_z) : nlohmann::ordered_json();
  if (m.coherent_2q) {
    j["coherent_2q"] = {m.coherent_2q->rx_control, m.coherent_2q->rx_target, m.coherent_2q->rz_control};
  } else {
    j["coherent_2q"] = nullptr;
  }
  j["seed"] = m.seed;
  return j;
}

/// Files are staged in memory and written at the end; on failure everything written is removed.
class OutputSet {
 public:
  void add(std::string name, std::string content) {
    for (auto& [n, c] : staged_) {
      if (n == name) {
        c = std::move(content);
        return;
      }
    }
    staged_.emplace_back(std::move(name), std::move(content));
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, c] : staged_) out.push_back(n);
    return out;
  }

  std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> written;
    std::error_code ec;
    const bool created = !fs::exists(dir) && fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
    try {
      for (const auto& [name, content] : staged_) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + p.string());
        written.push_back(p);
        out << content;
        if (!out.flush()) throw ConfigError("cannot write " + p.string());
      }
    } catch (...) {
      for (const auto& p : written) fs::remove(p, ec);
      if (created) fs::remove(dir, ec);
      throw;
    }
    return written;
  }

 private:
  std::vector<std::pair<std::string, std::string>> staged_;
};

template <class F>
std::string render(F&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace detail

/// Throws ConfigError for unrunnable configurations and NumericError for numerical failures.
inline RunResult run(const RunConfig& config) {
  if (auto problems = validate(config); !problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  const MoleculeFile mol = load_molecule(config.molecule_path);
  const FrameConfig frame = mol.frame();
  const int n = mol.spec.n_spins();
  check_dense_size(n);
  const HamiltonianTerms full_terms = build_rotating_frame_terms(mol.spec, frame);
  auto reduction = reduce_couplings(full_terms, 2 * kPi * config.reduce_below_hz);
  const HamiltonianTerms& terms = reduction.terms;

  std::optional<NoiseModel> noise;
  if (!config.noise_path.empty()) {
    noise = load_noise_model(config.noise_path);
    if (config.seed) noise->seed = *config.seed;
  }

  nlohmann::ordered_json manifest;
  manifest["tool"] = "qnmr";
  manifest["version"] = std::string(kVersion);
  manifest["mode"] = mode_name(config.mode);
  manifest["molecule_file"] = config.molecule_path;
  manifest["molecule"] = detail::molecule_json(mol.spec, frame);
  manifest["tau_s"] = config.tau;
  manifest["n_steps"] = config.n_steps;
  manifest["trotter_order"] = config.order;
  manifest["topology"] = topology_name(config.topology);
  manifest["reduce_below_hz"] = config.reduce_below_hz;
  nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
  for (const auto& p : reduction.removed) dropped.push_back({p.i, p.j});
  manifest["dropped_couplings"] = dropped;
  manifest["noise_file"] = config.noise_path;
  manifest["noise_model"] = noise ? detail::noise_json(*noise) : nlohmann::ordered_json();
  manifest["gamma_file"] = config.gamma_path;
  manifest["gamma_window_s_inv"] = config.gamma_window.value_or(0.0);
  manifest["padding"] = config.padding;
  manifest["symmetrize"] = config.symmetrize;
  manifest["readout"] = config.readout == ReadoutMode::kShots ? "shots" : "expectation";
  manifest["shots"] = config.shots;

  detail::OutputSet outputs;
  const std::vector<double> grid = uniform_grid(static_cast<std::size_t>(config.n_steps) + 1, config.tau);
  std::optional<CorrelationRecord> record;

  std::optional<Circuit> step;
  if (config.mode != RunMode::kExact && config.mode != RunMode::kLindblad) {
    step = trotter_step(terms, config.tau, config.order, config.topology);
    const GateCensus census = gate_census(*step);
    nlohmann::ordered_json c;
    for (const auto& [k, v] : census.by_kind) c[gate_name(k)] = v;
    manifest["gate_census"] = c;
    outputs.add("step.circuit", detail::render([&](std::ostream& o) { dump_circuit(o, *step); }));
  }
  if (noise && step) {
    const ErrorBudget budget = budget_from_circuit(*step, *noise, n, config.tau);
    outputs.add("budget.json", budget_report_json(budget, mol.spec, full_terms).dump(2) + "\n");
  }

  switch (config.mode) {
    case RunMode::kExact:
      record = exact_correlations(terms, n, grid);
      break;
    case RunMode::kTrotterNoiseless:
    case RunMode::kTrotterNoisy: {
      NoiseModel model = config.mode == RunMode::kTrotterNoisy ? *noise : NoiseModel{};
      if (config.seed) model.seed = *config.seed;
      SimulationOptions options;
      options.mode = config.readout;
      options.shots = config.shots;
      record = simulate_correlations(*step, config.n_steps, config.tau, model, options);
      break;
    }
    case RunMode::kBudget:
      break;
    case RunMode::kLindblad: {
      const DenseOperator h = dense_hamiltonian(terms, n);
      std::optional<LindbladModel> model;
      std::optional<double> reference;
      if (!config.gamma_path.empty()) {
        const GammaMatrixFile file = load_gamma_matrix(config.gamma_path);
        require(static_cast<int>(file.labels.front().size()) == n, "rate-matrix labels must have one character per spin");
        model.emplace(file.model(h));
      } else {
        const Circuit s = trotter_step(terms, config.tau, config.order, config.topology);
        const ErrorBudget budget = budget_from_circuit(s, *noise, n, config.tau);
        std::vector<int> p2l(n);
        for (int i = 0; i < n; ++i) p2l[s.layout_in[i]] = i;
        model.emplace(model_from_budget(terms, budget, p2l));
        reference = gamma_eff(budget);
        outputs.add("budget.json", budget_report_json(budget, mol.spec, full_terms).dump(2) + "\n");
      }
      const DenseOperator sz = total_spin(Axis::kZ, n);
      const DenseOperator sy = total_spin(Axis::kY, n);
      const auto cz = regression_correlation(*model, sz, sz, grid);
      const auto cy = regression_correlation(*model, sy, sz, grid);
      CorrelationRecord r;
      r.n_spins = n;
      r.tau = config.tau;
      r.times = grid;
      r.n_measured = grid.size();
      for (std::size_t k = 0; k < grid.size(); ++k) {
        r.cz.push_back(cz[k].real());
        r.cy.push_back(cy[k].real());
      }
      std::vector<double> envelope(r.cz);
      const EnvelopeFit fit = fit_envelope_rate(grid, envelope);
      manifest["eom_fit"] = {{"rate_s_inv", fit.rate},
                             {"residual", fit.residual},
                             {"decaying", fit.decaying},
                             {"gamma_eff_s_inv", reference ? nlohmann::ordered_json(*reference) : nlohmann::ordered_json()}};
      record = std::move(r);
      break;
    }
  }

  if (record) {
    const std::size_t padded = config.padding ? config.padding : default_padded_length(record->size());
    const Spectrum spectrum =
        spectrum_from_record(zero_pad(*record, padded), config.gamma_window.value_or(0.0), frame, config.symmetrize);
    for (double a : spectrum.amplitude) {
      if (!std::isfinite(a)) throw NumericError("spectrum contains non-finite values");
    }
    outputs.add("correlations.csv", detail::render([&](std::ostream& o) { write_correlations_csv(o, *record); }));
    outputs.add("spectrum.csv", detail::render([&](std::ostream& o) { write_spectrum_csv(o, spectrum); }));
    outputs.add("spectrum.txt", detail::render([&](std::ostream& o) { write_spectrum_plot_text(o, spectrum); }));
    nlohmann::ordered_json meta = spectrum_metadata_json(spectrum);
    nlohmann::ordered_json peaks = nlohmann::ordered_json::array();
    for (const auto& p : find_peaks(spectrum)) {
      peaks.push_back({{"ppm", p.ppm}, {"rad_s", p.omega}, {"amplitude", p.amplitude}});
    }
    meta["peaks"] = peaks;
    outputs.add("spectrum.json", meta.dump(2) + "\n");
  }

  nlohmann::ordered_json names = nlohmann::ordered_json::array();
  for (const auto& name : outputs.names()) names.push_back(name);
  names.push_back("manifest.json");
  manifest["outputs"] = names;
  outputs.add("manifest.json", manifest.dump(2) + "\n");

  RunResult result;
  result.files = outputs.commit(config.resolved_output_dir());
  result.manifest = std::move(manifest);
  return result;
}

/// run() with diagnostics on `err`. Exit codes: 0 ok, 1 configuration error, 2 numerical failure.
inline int run_main(const RunConfig& config, std::ostream& err = std::cerr) {
  try {
    run(config);
    return 0;
  } catch (const NumericError& e) {
    err << "qnmr: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "qnmr: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "qnmr: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qnmr

#endif  // QNMR_RUNNER_HPP

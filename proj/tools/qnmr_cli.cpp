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

// qnmr command line.
//
//   qnmr_cli run      --molecule m.mol --mode trotter-noisy --noise n.noise --tau 0.01 --steps 81 --out dir
//   qnmr_cli validate <same flags>
//   qnmr_cli circuit  --molecule m.mol --tau 0.01 [--order 1] [--topology linear]

#include "qnmr/qnmr.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_run_flags(CLI::App& app, qnmr::RunConfig& c, std::string& mode, std::string& topology,
                   std::string& readout, std::optional<double>& window, std::optional<std::uint64_t>& seed) {
  app.add_option("-m,--molecule", c.molecule_path, "Molecule file")->required();
  app.add_option("--mode", mode, "exact | trotter-noiseless | trotter-noisy | budget | lindblad")
      ->capture_default_str();
  app.add_option("--tau", c.tau, "Trotter step in s")->capture_default_str();
  app.add_option("-n,--steps", c.n_steps, "Number of Trotter steps")->capture_default_str();
  app.add_option("--order", c.order, "Trotter order (1 or 2)")->capture_default_str();
  app.add_option("--topology", topology, "all-to-all | linear")->capture_default_str();
  app.add_option("--noise", c.noise_path, "Noise model / calibration file");
  app.add_option("--gamma-matrix", c.gamma_path, "Lindblad rate-matrix file");
  app.add_option("--window", window, "Exponential window Gamma in s^-1 (required in exact mode)");
  app.add_option("--padding", c.padding, "Zero-padded length (0: default)")->capture_default_str();
  app.add_flag("--symmetrize", c.symmetrize, "Drop C_y before the transform");
  app.add_option("-o,--out", c.output_dir, std::string("Output directory (default $") + qnmr::kOutputDirEnv + ")");
  app.add_option("--seed", seed, "RNG seed, overrides the noise file");
  app.add_option("--readout", readout, "expectation | shots")->capture_default_str();
  app.add_option("--shots", c.shots, "Shots per time point in shot mode")->capture_default_str();
  app.add_option("--reduce-below", c.reduce_below_hz, "Drop couplings with |J| below this (Hz)");
}

// Unknown enumerators become ConfigErrors so they surface through validate().
bool finish_config(qnmr::RunConfig& c, const std::string& mode, const std::string& topology,
                   const std::string& readout, const std::optional<double>& window,
                   const std::optional<std::uint64_t>& seed, std::vector<std::string>& problems) {
  if (auto m = qnmr::parse_mode(mode)) {
    c.mode = *m;
  } else {
    problems.push_back("unknown mode '" + mode + "'");
  }
  try {
    c.topology = qnmr::parse_topology(topology);
  } catch (const qnmr::Error& e) {
    problems.push_back(e.what());
  }
  if (readout == "shots") {
    c.readout = qnmr::ReadoutMode::kShots;
  } else if (readout != "expectation") {
    problems.push_back("unknown readout '" + readout + "'");
  }
  c.gamma_window = window;
  c.seed = seed;
  return problems.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnmr: NMR spectra from Trotterized spin dynamics"};
  app.set_version_flag("--version", std::string(qnmr::kVersion));
  app.require_subcommand(1);

  qnmr::RunConfig config;
  std::string mode = "trotter-noiseless", topology = "all-to-all", readout = "expectation";
  std::optional<double> window;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment and write its data files");
  add_run_flags(*run_cmd, config, mode, topology, readout, window, seed);
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration without running it");
  add_run_flags(*validate_cmd, config, mode, topology, readout, window, seed);

  auto* circuit_cmd = app.add_subcommand("circuit", "Print one Trotter step and its gate census");
  std::string molecule;
  double tau = 0.01, reduce = 0.0;
  int order = 2;
  std::string circuit_topology = "all-to-all";
  circuit_cmd->add_option("-m,--molecule", molecule, "Molecule file")->required();
  circuit_cmd->add_option("--tau", tau, "Trotter step in s")->capture_default_str();
  circuit_cmd->add_option("--order", order, "Trotter order")->capture_default_str();
  circuit_cmd->add_option("--topology", circuit_topology, "all-to-all | linear")->capture_default_str();
  circuit_cmd->add_option("--reduce-below", reduce, "Drop couplings with |J| below this (Hz)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::vector<std::string> problems;
  if (run_cmd->parsed() || validate_cmd->parsed()) {
    finish_config(config, mode, topology, readout, window, seed, problems);
    for (const auto& p : qnmr::validate(config)) problems.push_back(p);
    if (validate_cmd->parsed()) {
      for (const auto& p : problems) std::cout << p << '\n';
      return problems.empty() ? 0 : 1;
    }
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "qnmr: " << p << '\n';
      return 1;
    }
    return qnmr::run_main(config);
  }

  try {
    const auto mol = qnmr::load_molecule(molecule);
    auto terms = qnmr::reduce_couplings(qnmr::build_rotating_frame_terms(mol.spec, mol.frame()), 2 * qnmr::kPi * reduce);
    const auto step = qnmr::trotter_step(terms.terms, tau, order, qnmr::parse_topology(circuit_topology));
    qnmr::dump_circuit(std::cout, step);
    const auto census = qnmr::gate_census(step);
    for (const auto& [kind, count] : census.by_kind) {
      std::cout << "# census " << qnmr::gate_name(kind) << ' ' << count << '\n';
    }
    return 0;
  } catch (const qnmr::NumericError& e) {
    std::cerr << "qnmr: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qnmr: " << e.what() << '\n';
    return 1;
  }
}

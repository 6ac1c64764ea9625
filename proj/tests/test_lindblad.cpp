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

#include "oracle.hpp"
#include "qnmr/exact_reference.hpp"
#include "qnmr/lindblad.hpp"
#include "qnmr/noisy_simulator.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace qnmr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DenseOperator pauli_op(const std::string& label) { return PauliString(label).matrix(); }

DenseOperator random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const auto d = static_cast<Eigen::Index>(dimension_of(n));
  DenseOperator a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  DenseOperator rho = a * a.adjoint();
  return rho / rho.trace();
}

LindbladModel diagonal_model(const DenseOperator& h, const std::vector<std::string>& labels, double rate) {
  std::vector<DenseOperator> ops;
  for (const auto& l : labels) ops.push_back(pauli_op(l));
  DenseOperator g = rate * DenseOperator::Identity(labels.size(), labels.size());
  return LindbladModel(h, ops, g, labels);
}

HamiltonianTerms cis_terms() {
  auto spec = molecules::cis_3_chloroacrylic_acid();
  return build_rotating_frame_terms(spec, FrameConfig::centered(spec));
}

HamiltonianTerms tcb_terms() {
  auto spec = molecules::trichlorobenzene();
  return build_rotating_frame_terms(spec, FrameConfig::centered(spec));
}

}  // namespace

TEST_CASE("noise-free generator is the commutator", "[lindblad]") {
  std::mt19937_64 rng(1);
  DenseOperator h = dense_hamiltonian(tcb_terms(), 3);
  DenseOperator rho = random_density(3, rng);
  LindbladModel m(h);
  const Complex i(0, 1);
  CHECK((master_rhs(rho, m) - (-i * (h * rho - rho * h))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single dephasing operator damps coherences at 2 gamma", "[lindblad]") {
  const double g = 0.7;
  auto m = diagonal_model(DenseOperator::Zero(2, 2), {"Z"}, g);
  DenseOperator rho(2, 2);
  rho << 0.6, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.4;
  DenseOperator d = master_rhs(rho, m);
  CHECK(std::abs(d(0, 1) - (-2 * g) * rho(0, 1)) < 1e-15);
  CHECK(std::abs(d(0, 0)) < 1e-15);
}

TEST_CASE("equal Pauli rates give depolarizing with coefficient 4", "[lindblad]") {
  const double g = 0.3;
  auto m = diagonal_model(DenseOperator::Zero(2, 2), {"X", "Y", "Z"}, g);
  std::mt19937_64 rng(2);
  DenseOperator rho = random_density(1, rng);
  DenseOperator z = pauli_op("Z");
  CHECK_THAT((z * master_rhs(rho, m)).trace().real(), WithinAbs(-4 * g * (z * rho).trace().real(), 1e-14));
}

TEST_CASE("iXiX and iYiY terms contribute -4 gamma to the spin they act on", "[lindblad]") {
  const double g = 0.45;
  auto m = diagonal_model(DenseOperator::Zero(4, 4), {"iX", "iY"}, g);
  std::mt19937_64 rng(3);
  DenseOperator rho = random_density(2, rng);
  DenseOperator z1 = pauli_op("iZ"), z0 = pauli_op("Zi");
  DenseOperator d = master_rhs(rho, m);
  CHECK_THAT((z1 * d).trace().real(), WithinAbs(-4 * g * (z1 * rho).trace().real(), 1e-14));
  CHECK_THAT((z0 * d).trace().real(), WithinAbs(0.0, 1e-14));
}

TEST_CASE("anticommutator orderings", "[lindblad]") {
  std::mt19937_64 rng(4);
  DenseOperator rho = random_density(1, rng);
  std::vector<DenseOperator> ops = {pauli_op("X"), pauli_op("Y")};
  // Hermitian and PSD; the imaginary off-diagonal is where the two readings differ.
  DenseOperator gamma(2, 2);
  gamma << 0.5, Complex(0, 0.2), Complex(0, -0.2), 0.5;
  DenseOperator h = 3.0 * pauli_op("X");
  LindbladModel tp(h, ops, gamma, {}, AnticommutatorOrder::kTracePreserving);
  LindbladModel written(h, ops, gamma, {}, AnticommutatorOrder::kAsWritten);
  CHECK(std::abs(master_rhs(rho, tp).trace()) < 1e-15);
  CHECK(std::abs(master_rhs(rho, written).trace()) > 1e-3);

  DenseOperator diag = DenseOperator::Identity(2, 2) * 0.5;
  LindbladModel tp_diag(h, ops, diag, {}, AnticommutatorOrder::kTracePreserving);
  LindbladModel written_diag(h, ops, diag, {}, AnticommutatorOrder::kAsWritten);
  CHECK((master_rhs(rho, tp_diag) - master_rhs(rho, written_diag)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("liouvillian acts like the master equation", "[lindblad]") {
  std::mt19937_64 rng(5);
  auto m = model_from_budget(cis_terms(), [] {
    ErrorBudget b;
    b.n_spins = 2;
    b.tau = 0.01;
    b.entries.push_back({GateKind::kCnot, {0, 1}, 0.01, std::nullopt, ""});
    b.entries.push_back({GateKind::kSqrtX, {1}, 0.002, std::nullopt, ""});
    return b;
  }());
  DenseOperator rho = random_density(2, rng);
  DenseOperator l = liouvillian(m);
  Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(rho.data(), rho.size());
  Eigen::VectorXcd lv = l * v;
  DenseOperator expected = master_rhs(rho, m);
  CHECK((Eigen::Map<DenseOperator>(lv.data(), 4, 4) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("model validation", "[lindblad]") {
  DenseOperator h = DenseOperator::Zero(2, 2);
  std::vector<DenseOperator> ops = {pauli_op("X"), pauli_op("Z")};
  DenseOperator not_hermitian(2, 2);
  not_hermitian << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(LindbladModel(h, ops, not_hermitian), ConfigError);
  DenseOperator negative(2, 2);
  negative << 1, 2, 2, 1;
  CHECK_THROWS_AS(LindbladModel(h, ops, negative), ConfigError);
  CHECK_THROWS_AS(LindbladModel(h, ops, DenseOperator::Identity(3, 3)), ConfigError);
  CHECK_THROWS_AS(LindbladModel(h, {pauli_op("XX")}, DenseOperator::Identity(1, 1)), ConfigError);
  CHECK_THROWS_AS(LindbladModel(h, ops, DenseOperator::Identity(2, 2), {"X"}), ConfigError);
  CHECK_NOTHROW(LindbladModel(h, ops, DenseOperator::Identity(2, 2)));
  LindbladModel m(h, ops, DenseOperator::Identity(2, 2));
  CHECK_THROWS_AS(master_rhs(DenseOperator::Identity(4, 4), m), ConfigError);
}

TEST_CASE("Rabi oscillation without noise", "[lindblad]") {
  const double eps = 25.0;
  LindbladModel m(eps * pauli_op("X"));
  DenseOperator rho0 = DenseOperator::Zero(2, 2);
  rho0(0, 0) = 1.0;
  auto grid = uniform_grid(300, 1e-3);
  auto traj = integrate(m, rho0, grid);
  REQUIRE(traj.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK_THAT((pauli_op("Z") * traj[k]).trace().real(), WithinAbs(std::cos(2 * eps * grid[k]), 1e-8));
  }
  auto single = integrate(m, rho0, {0.0});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == rho0);
  CHECK_THROWS_AS(integrate(m, rho0, {0.0, 0.2, 0.1}), ConfigError);
  CHECK_THROWS_AS(integrate(m, rho0, {}), ConfigError);
}

TEST_CASE("depolarized Rabi oscillation follows the analytic law", "[lindblad]") {
  const double eps = 25.0, gamma_dep = 2.0;
  auto m = depolarizing_model(eps * pauli_op("X"), 1, {gamma_dep});
  DenseOperator rho0 = DenseOperator::Zero(2, 2);
  rho0(0, 0) = 1.0;
  auto grid = uniform_grid(400, 1e-3);
  auto traj = integrate(m, rho0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK_THAT((pauli_op("Z") * traj[k]).trace().real(),
               WithinAbs(single_spin_correlation(eps, gamma_dep, grid[k]), 1e-8));
    CHECK_THAT(traj[k].trace().real(), WithinAbs(1.0, 1e-8));
  }
}

TEST_CASE("integration meets its step-halving contract against the exact propagator", "[lindblad][property]") {
  std::mt19937_64 rng(7);
  auto spec = molecules::cis_3_chloroacrylic_acid();
  auto terms = build_rotating_frame_terms(spec, FrameConfig::centered(spec));
  auto m = depolarizing_model(dense_hamiltonian(terms, 2), 2, {1.5, 0.5});
  DenseOperator rho0 = random_density(2, rng);
  std::vector<double> grid = {0.0, 0.003, 0.01, 0.05, 0.2};
  auto traj = integrate(m, rho0, grid);
  oracle::Mat l = liouvillian(m);
  Eigen::VectorXcd v0 = Eigen::Map<Eigen::VectorXcd>(rho0.data(), rho0.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    oracle::Mat step = (l * grid[k]).exp();
    Eigen::VectorXcd v = step * v0;
    CHECK(trace_distance(Eigen::Map<DenseOperator>(v.data(), 4, 4), traj[k]) < 1e-7);
    CHECK_THAT(traj[k].trace().real(), WithinAbs(1.0, 1e-8));
  }
}

TEST_CASE("regression correlations without noise equal the exact ones", "[lindblad][property]") {
  auto single = HamiltonianTerms{1, {{0, 50.0}}, {}};
  for (const auto& terms : {single, cis_terms(), tcb_terms()}) {
    const int n = terms.n_spins;
    auto grid = uniform_grid(120, 2e-3);
    LindbladModel m(dense_hamiltonian(terms, n));
    const DenseOperator sz = total_spin(Axis::kZ, n), sy = total_spin(Axis::kY, n);
    auto cz = regression_correlation(m, sz, sz, grid);
    auto cy = regression_correlation(m, sy, sz, grid);
    auto exact = exact_correlations(terms, n, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK_THAT(cz[k].real(), WithinAbs(exact.cz[k], 1e-8));
      CHECK_THAT(cy[k].real(), WithinAbs(exact.cy[k], 1e-8));
    }
  }
}

TEST_CASE("single spin regression pair obeys the coupled equations of motion", "[lindblad]") {
  const double eps = 30.0, tau = 1e-4;
  LindbladModel m(eps * pauli_op("X"));
  auto grid = uniform_grid(200, tau);
  const DenseOperator z = pauli_op("Z"), y = pauli_op("Y");
  auto czz = regression_correlation(m, z, z, grid);
  auto cyz = regression_correlation(m, y, z, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK_THAT(czz[k].real(), WithinAbs(2 * std::cos(2 * eps * grid[k]), 1e-8));
  }
  // d/dt C_zz = 2 eps C_yz and d/dt C_yz = -2 eps C_zz, by central differences.
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double dzz = (czz[k + 1] - czz[k - 1]).real() / (2 * tau);
    const double dyz = (cyz[k + 1] - cyz[k - 1]).real() / (2 * tau);
    CHECK_THAT(dzz, WithinAbs(2 * eps * cyz[k].real(), 1e-3));
    CHECK_THAT(dyz, WithinAbs(-2 * eps * czz[k].real(), 1e-3));
  }
}

TEST_CASE("envelope fits", "[lindblad]") {
  const double eps = 40.0, gamma_dep = 1.25;
  auto m = depolarizing_model(eps * pauli_op("X"), 1, {gamma_dep});
  auto est = broadening_estimate(m, 1, uniform_grid(600, 1e-3), 0.0);
  CHECK(est.decaying);
  CHECK_THAT(est.rate, WithinRel(4 * gamma_dep, 0.05));

  auto still = broadening_estimate(LindbladModel(eps * pauli_op("X")), 1, uniform_grid(600, 1e-3), 0.0);
  // Peak heights carry the integrator's 1e-8 tolerance, nothing more.
  CHECK(still.rate >= 0.0);
  CHECK(still.rate < 1e-6);

  // Monotone series fall back to fitting every sample.
  std::vector<double> t = uniform_grid(50, 0.01), v;
  for (double x : t) v.push_back(3.0 * std::exp(-2.0 * x));
  auto fit = fit_envelope_rate(t, v);
  CHECK(fit.n_points == 50);
  CHECK_THAT(fit.rate, WithinRel(2.0, 1e-10));
  CHECK(fit.residual < 1e-12);

  auto flat = fit_envelope_rate({0.0, 1.0}, {0.0, 0.0});
  CHECK_FALSE(flat.decaying);
  CHECK(flat.rate == 0.0);
  CHECK_THROWS_AS(fit_envelope_rate({0.0}, {1.0, 2.0}), ConfigError);
}

TEST_CASE("budget bridge builds per-qubit Pauli rates", "[lindblad]") {
  ErrorBudget b;
  b.n_spins = 2;
  b.tau = 0.01;
  b.entries.push_back({GateKind::kCnot, {0, 1}, 0.012, 4e-7, ""});
  b.entries.push_back({GateKind::kSqrtX, {1}, 0.001, std::nullopt, ""});
  auto rates = budget_qubit_rates(b);
  // eps / (3d/(4(d+1)) n tau) per qubit.
  CHECK_THAT(rates[0], WithinRel(0.012 / (0.6 * 2 * 0.01), 1e-13));
  CHECK_THAT(rates[1], WithinRel(0.012 / (0.6 * 2 * 0.01) + 0.001 / (0.5 * 0.01), 1e-13));
  CHECK_THAT(rates[0] + rates[1], WithinRel(rescaled_rate_sum(b), 1e-13));
  // A physical-to-logical map swaps the rates.
  auto swapped = budget_qubit_rates(b, {1, 0});
  CHECK(swapped[0] == rates[1]);
  CHECK(swapped[1] == rates[0]);

  auto m = model_from_budget(cis_terms(), b);
  REQUIRE(m.ops().size() == 6);
  CHECK(m.labels()[0] == "Xi");
  CHECK(m.labels()[5] == "iZ");
  CHECK_THAT(m.gamma()(0, 0).real(), WithinRel(rates[0] / 4, 1e-14));
  CHECK_THAT(m.gamma()(5, 5).real(), WithinRel(rates[1] / 4, 1e-14));
  CHECK((m.hamiltonian() - dense_hamiltonian(cis_terms(), 2)).cwiseAbs().maxCoeff() == 0.0);

  // Each qubit's Bloch vector then decays at its full rate.
  DenseOperator rho = DenseOperator::Identity(4, 4) / 4.0;
  rho += 0.1 * pauli_op("iZ") + 0.05 * pauli_op("Zi");
  auto zero_h = model_from_budget(HamiltonianTerms{2, {}, {}}, b);
  DenseOperator d = master_rhs(rho, zero_h);
  CHECK_THAT((pauli_op("iZ") * d).trace().real(), WithinRel(-rates[1] * (pauli_op("iZ") * rho).trace().real(), 1e-12));
  CHECK_THAT((pauli_op("Zi") * d).trace().real(), WithinRel(-rates[0] * (pauli_op("Zi") * rho).trace().real(), 1e-12));
}

TEST_CASE("Lindblad and per-gate channels agree for dense single-qubit noise", "[lindblad][property]") {
  // Each step ends with X X on every qubit and only X is noisy, so every channel is a
  // single-qubit depolarizer at the step boundary (X commutes with it, X X = I).
  auto terms = cis_terms();
  const double tau = 2.5e-4, eps = 1e-4;
  const int steps = 800;
  auto step = trotter_step(terms, tau, 2, Topology::kAllToAll);
  for (int q = 0; q < 2; ++q) {
    step.gates.push_back(Gate::x(q));
    step.gates.push_back(Gate::x(q));
  }
  NoiseModel noise;
  noise.gate_error[GateKind::kX] = eps;
  auto sim = simulate_correlations(step, steps, tau, noise);
  auto clean = simulate_correlations(step, steps, tau, NoiseModel{});

  auto budget = budget_from_circuit(step, noise, 2, tau);
  auto m = model_from_budget(terms, budget);
  const DenseOperator sz = total_spin(Axis::kZ, 2);
  const auto grid = uniform_grid(steps + 1, tau);
  auto lin = regression_correlation(m, sz, sz, grid);
  auto exact = exact_correlations(terms, 2, grid);
  const double scale = sim.cz[0];
  for (std::size_t k = 0; k < sim.size(); k += 40) {
    // Compare the noise-induced change so that Trotter error drops out.
    CHECK_THAT(sim.cz[k] - clean.cz[k], WithinAbs(lin[k].real() - exact.cz[k], 0.01 * scale));
    CHECK_THAT(sim.cz[k], WithinAbs(lin[k].real(), 0.01 * scale));
  }
  // The decay is material over the window, so the comparison has teeth.
  CHECK(std::exp(-budget_qubit_rates(budget)[0] * steps * tau) < 0.75);
}

TEST_CASE("rate-matrix files", "[lindblad][io]") {
  std::istringstream in(
      "# two-spin noise terms\nunits s^-1\nops iX Xi\ngamma iXiX 0.25\ngamma Xi Xi 0.5\n"
      "gamma iX Xi 0.1 0.05\n");
  auto f = parse_gamma_matrix(in);
  REQUIRE(f.labels == std::vector<std::string>{"iX", "Xi"});
  CHECK(f.gamma(0, 0) == Complex(0.25, 0));
  CHECK(f.gamma(1, 1) == Complex(0.5, 0));
  CHECK(f.gamma(0, 1) == Complex(0.1, 0.05));
  CHECK(f.gamma(1, 0) == Complex(0.1, -0.05));
  auto m = f.model(DenseOperator::Zero(4, 4));
  CHECK(m.ops().size() == 2);

  std::istringstream inferred("units s^-1\ngamma ZiZi 1\ngamma iZiZ 2\n");
  auto g = parse_gamma_matrix(inferred);
  CHECK(g.labels == std::vector<std::string>{"Zi", "iZ"});

  for (const char* bad : {"gamma XX 1\n", "units Hz\ngamma XX 1\n", "units s^-1\n", "units s^-1\ngamma XQ 1\n",
                          "units s^-1\ngamma XiX 1\n", "units s^-1\ngamma Xi Xi 1\ngamma Xi Xi 2\n",
                          "units s^-1\nrate Xi Xi 1\n", "units s^-1\ngamma Xi Xi one\n",
                          "units s^-1\nops Xi iXi\n"}) {
    std::istringstream bad_in(bad);
    CHECK_THROWS_AS(parse_gamma_matrix(bad_in), ConfigError);
  }
  std::istringstream not_psd("units s^-1\ngamma X X 1\ngamma Y Y 1\ngamma X Y 3\n");
  auto h = parse_gamma_matrix(not_psd);
  CHECK_THROWS_AS(h.model(DenseOperator::Zero(2, 2)), ConfigError);
  CHECK_THROWS_AS(load_gamma_matrix("/nonexistent.gamma"), ConfigError);

  auto sample = load_gamma_matrix(std::string(QNMR_SAMPLE_DATA) + "/two_spin_depolarizing.gamma");
  CHECK(sample.labels.size() == 6);
}

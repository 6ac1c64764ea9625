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
#include "qnmr/spectrum.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

using namespace qnmr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

HamiltonianTerms cis_terms() {
  auto spec = molecules::cis_3_chloroacrylic_acid();
  return build_rotating_frame_terms(spec, FrameConfig::centered(spec));
}

HamiltonianTerms tcb_terms() {
  auto spec = molecules::trichlorobenzene();
  return build_rotating_frame_terms(spec, FrameConfig::centered(spec));
}

oracle::Mat oracle_hamiltonian(const HamiltonianTerms& t) {
  std::vector<double> omega(t.n_spins, 0.0);
  std::vector<std::vector<double>> j(t.n_spins, std::vector<double>(t.n_spins, 0.0));
  for (const auto& o : t.onsite) omega[o.spin] = o.omega;
  for (const auto& p : t.pairs) j[p.i][p.j] = p.coupling;
  return oracle::hamiltonian(omega, j);
}

/// Tr{A(t) B} by the Pade exponential.
double oracle_trace(const oracle::Mat& h, char a, double t, int n) {
  oracle::Mat u = oracle::expm_i(h, t);
  return (u.adjoint() * oracle::total(a, n) * u * oracle::total('Z', n)).trace().real();
}

}  // namespace

TEST_CASE("dense hamiltonian matches the Kronecker construction", "[exact]") {
  for (const auto& terms : {cis_terms(), tcb_terms()}) {
    DenseOperator h = dense_hamiltonian(terms, terms.n_spins);
    CHECK((h - oracle_hamiltonian(terms)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dense hamiltonian small cases", "[exact]") {
  // Onsite 2 eps on S^x is eps sigma^x.
  HamiltonianTerms one{1, {{0, 2 * 0.7}}, {}};
  DenseOperator h1 = dense_hamiltonian(one, 1);
  CHECK((h1 - 0.7 * oracle::pauli('X')).cwiseAbs().maxCoeff() < 1e-15);

  HamiltonianTerms pair{2, {}, {{0, 1, 1.0}}};
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(dense_hamiltonian(pair, 2));
  Eigen::Vector4d expected(-0.75, 0.25, 0.25, 0.25);
  CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-14);

  HamiltonianTerms empty{3, {}, {}};
  CHECK(dense_hamiltonian(empty, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(dense_hamiltonian(empty, 13), DimensionError);
}

TEST_CASE("propagators are unitary and agree with the Pade exponential", "[exact][property]") {
  auto terms = tcb_terms();
  DenseOperator h = dense_hamiltonian(terms, 3);
  Propagator prop(h);
  for (double t : {0.0, 1e-3, 0.05, 0.4, 2.0}) {
    DenseOperator u = prop.at(t);
    CHECK((u * u.adjoint() - DenseOperator::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(phase_aligned_distance(u, oracle::expm_i(h, t)) < 1e-10);
  }
}

TEST_CASE("exact correlations agree with the trace oracle", "[exact]") {
  for (const auto& terms : {cis_terms(), tcb_terms()}) {
    const int n = terms.n_spins;
    auto grid = uniform_grid(40, 0.013);
    auto fast = exact_correlations(terms, n, grid);
    auto direct = trace_correlations(terms, n, grid);
    oracle::Mat h = oracle_hamiltonian(terms);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK_THAT(fast.cz[k], WithinAbs(oracle_trace(h, 'Z', grid[k], n), 1e-10));
      CHECK_THAT(fast.cy[k], WithinAbs(oracle_trace(h, 'Y', grid[k], n), 1e-10));
      CHECK_THAT(direct.cz[k], WithinAbs(fast.cz[k], 1e-10));
      CHECK_THAT(direct.cy[k], WithinAbs(fast.cy[k], 1e-10));
    }
  }
}

TEST_CASE("equal-time correlations", "[exact]") {
  for (const auto& terms : {cis_terms(), tcb_terms()}) {
    const int n = terms.n_spins;
    auto r = exact_correlations(terms, n, {0.0});
    CHECK_THAT(r.cz[0], WithinAbs(n * static_cast<double>(dimension_of(n)) / 4.0, 1e-12));
    CHECK_THAT(r.cy[0], WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("single spin correlation oscillates at twice the Rabi parameter", "[exact]") {
  const double eps = 37.0;
  HamiltonianTerms one{1, {{0, 2 * eps}}, {}};
  auto grid = uniform_grid(200, 1e-3);
  auto r = exact_correlations(one, 1, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK_THAT(r.cz[k], WithinAbs(0.5 * std::cos(2 * eps * grid[k]), 1e-12));
  }
}

TEST_CASE("two-spin C_y vanishes", "[exact][property]") {
  auto r = exact_correlations(cis_terms(), 2, uniform_grid(500, 0.01));
  for (double v : r.cy) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("sector restriction equals the full trace", "[exact][property]") {
  auto single = HamiltonianTerms{1, {{0, 31.0}}, {}};
  for (const auto& terms : {single, cis_terms(), tcb_terms()}) {
    const int n = terms.n_spins;
    auto grid = uniform_grid(60, 0.007);
    auto full = trace_correlations(terms, n, grid);
    auto sectors = sector_correlations(terms, n, grid);
    std::size_t positive = 0;
    for (std::size_t m = 0; m < dimension_of(n); ++m) positive += basis_magnetization(m, n) > 0;
    CHECK(sectors.per_sector.size() == positive);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK_THAT(sectors.cz[k], WithinAbs(full.cz[k], 1e-10));
      CHECK_THAT(sectors.cy[k], WithinAbs(full.cy[k], 1e-10));
    }
  }
}

TEST_CASE("exact spectrum needs an explicit window", "[exact]") {
  auto spec = molecules::cis_3_chloroacrylic_acid();
  auto r = exact_correlations(cis_terms(), 2, uniform_grid(10, 0.01));
  CHECK_THROWS_AS(exact_spectrum(r, -1.0, FrameConfig::centered(spec)), ConfigError);
  CHECK_THROWS_AS(exact_spectrum(r, std::nan(""), FrameConfig::centered(spec)), ConfigError);
}

TEST_CASE("single spin line sits at its chemical shift with FWHM 2 Gamma", "[exact][spectrum]") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  MoleculeSpec spec("one", {7.0}, zero, 11.7);
  FrameConfig frame = FrameConfig::at(spec, 6.8);
  auto terms = build_rotating_frame_terms(spec, frame);
  const double gamma = 4.0;
  const double tau = 5e-4;
  auto r = exact_correlations(terms, 1, uniform_grid(4096, tau));
  auto s = exact_spectrum(zero_pad(r, 1 << 15), gamma, frame);
  auto peaks = find_peaks(s, 0.2);
  REQUIRE(peaks.size() == 1);
  CHECK_THAT(peaks[0].ppm, WithinAbs(7.0, s.freq_ppm[1] - s.freq_ppm[0]));
  CHECK_THAT(peak_fwhm(s, peaks[0].index), WithinAbs(2 * gamma, s.bin_width()));
}

TEST_CASE("two-spin exact spectrum has the eigenvalue transitions", "[exact][spectrum]") {
  auto spec = molecules::cis_3_chloroacrylic_acid();
  auto terms = cis_terms();
  // Transition frequencies E_a - E_b weighted by |<a|S^z|b>|^2 from a general eigensolver.
  oracle::Mat h = oracle_hamiltonian(terms);
  Eigen::ComplexEigenSolver<oracle::Mat> es(h);
  oracle::Mat v = es.eigenvectors();
  for (int c = 0; c < v.cols(); ++c) v.col(c).normalize();
  oracle::Mat sz = v.adjoint() * oracle::total('Z', 2) * v;
  std::vector<double> lines;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      double w = std::norm(sz(a, b));
      double f = es.eigenvalues()(a).real() - es.eigenvalues()(b).real();
      bool seen = false;
      for (double l : lines) seen = seen || std::abs(l - f) < 1e-6;
      if (w > 1e-6 && std::abs(f) > 1e-6 && !seen) lines.push_back(f);
    }
  }
  std::sort(lines.begin(), lines.end());
  REQUIRE(lines.size() == 4);

  const double tau = 2e-3;
  auto r = exact_correlations(terms, 2, uniform_grid(8192, tau));
  auto s = exact_spectrum(zero_pad(r, 1 << 16), 1.0, FrameConfig::centered(spec));
  auto peaks = find_peaks(s, 0.05);
  REQUIRE(peaks.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK_THAT(peaks[k].omega, WithinAbs(lines[k], s.bin_width()));
  // Symmetric about the frame center, split by J.
  CHECK_THAT(peaks[0].omega + peaks[3].omega, WithinAbs(0.0, 1e-6));
  CHECK_THAT(peaks[1].omega + peaks[2].omega, WithinAbs(0.0, 1e-6));
  CHECK_THAT(peaks[1].omega - peaks[0].omega, WithinAbs(2 * kPi * 7.92, s.bin_width()));
}

TEST_CASE("integrated spectrum equals pi C_z(0)", "[exact][spectrum][property]") {
  auto spec = molecules::trichlorobenzene();
  const double tau = 1e-3, gamma = 5.0;
  // Gamma T = 10.
  auto r = exact_correlations(tcb_terms(), 3, uniform_grid(2001, tau));
  auto s = exact_spectrum(r, gamma, FrameConfig::centered(spec));
  CHECK_THAT(integrated_area(s), WithinRel(kPi * r.cz[0], 0.02));
}

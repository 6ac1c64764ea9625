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

// Dense-matrix ground truth. Everything here is O(4^N) and capped at kMaxDenseSpins.

#ifndef QNMR_EXACT_REFERENCE_HPP
#define QNMR_EXACT_REFERENCE_HPP

#include "qnmr/correlation.hpp"
#include "qnmr/pauli.hpp"
#include "qnmr/spectrum.hpp"
#include "qnmr/spin_system.hpp"

#include <vector>

namespace qnmr {

/// sum_i w_i S^x_i + sum_{i<j} 2 pi J_ij S_i . S_j.
inline DenseOperator dense_hamiltonian(const HamiltonianTerms& terms, int n_spins) {
  check_dense_size(n_spins);
  require(n_spins >= terms.n_spins, "n_spins smaller than the term list");
  const std::size_t dim = dimension_of(n_spins);
  DenseOperator h = DenseOperator::Zero(dim, dim);
  for (const auto& t : terms.onsite) h += t.omega * spin_operator(Axis::kX, t.spin, n_spins);
  for (const auto& p : terms.pairs) {
    for (Axis a : {Axis::kX, Axis::kY, Axis::kZ}) {
      h += p.coupling * spin_operator(a, p.i, n_spins) * spin_operator(a, p.j, n_spins);
    }
  }
  return h;
}

/// exp(-i H t) through one Hermitian eigendecomposition.
class Propagator {
 public:
  explicit Propagator(const DenseOperator& hamiltonian) : solver_(hamiltonian) {
    if (solver_.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  }

  DenseOperator at(double t) const {
    const auto& v = solver_.eigenvectors();
    Eigen::VectorXcd phases = (Complex(0, -t) * solver_.eigenvalues().cast<Complex>()).array().exp();
    return v * phases.asDiagonal() * v.adjoint();
  }

  const Eigen::VectorXd& energies() const { return solver_.eigenvalues(); }
  const DenseOperator& basis() const { return solver_.eigenvectors(); }

 private:
  Eigen::SelfAdjointEigenSolver<DenseOperator> solver_;
};

namespace detail {

inline double grid_step(const std::vector<double>& t_grid) {
  require(!t_grid.empty(), "time grid is empty");
  require(t_grid.front() == 0.0, "time grid must start at 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    require(t_grid[k] > t_grid[k - 1], "time grid must be strictly ascending");
  }
  return t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 1.0;
}

inline CorrelationRecord make_record(int n_spins, const std::vector<double>& t_grid) {
  CorrelationRecord r;
  r.n_spins = n_spins;
  r.tau = grid_step(t_grid);
  r.times = t_grid;
  r.cz.assign(t_grid.size(), 0.0);
  r.cy.assign(t_grid.size(), 0.0);
  r.n_measured = t_grid.size();
  return r;
}

}  // namespace detail

/// Full-trace correlations evaluated in the energy eigenbasis:
/// Tr{U^dag A U B} = sum_ab e^{i(E_a - E_b)t} A_ab B_ba.
inline CorrelationRecord exact_correlations(const HamiltonianTerms& terms, int n_spins,
                                            const std::vector<double>& t_grid) {
  CorrelationRecord r = detail::make_record(n_spins, t_grid);
  Propagator prop(dense_hamiltonian(terms, n_spins));
  const DenseOperator& v = prop.basis();
  const DenseOperator sz = v.adjoint() * total_spin(Axis::kZ, n_spins) * v;
  const DenseOperator sy = v.adjoint() * total_spin(Axis::kY, n_spins) * v;
  const Eigen::VectorXd& e = prop.energies();
  const Eigen::Index dim = e.size();
  // Pair weights are time independent; only the phases move.
  DenseOperator wz(dim, dim), wy(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      wz(a, b) = sz(a, b) * sz(b, a);
      wy(a, b) = sy(a, b) * sz(b, a);
    }
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    Eigen::VectorXcd phase = (Complex(0, t_grid[k]) * e.cast<Complex>()).array().exp();
    // phase^dag W^T phase = sum_ab e^{i(E_a - E_b)t} W_ab.
    Complex cz = (phase.adjoint() * wz.transpose() * phase)(0, 0);
    Complex cy = (phase.adjoint() * wy.transpose() * phase)(0, 0);
    r.cz[k] = cz.real();
    r.cy[k] = cy.real();
  }
  return r;
}

/// Tr{U(t)^dag S U(t) S^z_tot} with U(t) formed explicitly at every t.
inline CorrelationRecord trace_correlations(const HamiltonianTerms& terms, int n_spins,
                                            const std::vector<double>& t_grid) {
  CorrelationRecord r = detail::make_record(n_spins, t_grid);
  Propagator prop(dense_hamiltonian(terms, n_spins));
  const DenseOperator sz = total_spin(Axis::kZ, n_spins);
  const DenseOperator sy = total_spin(Axis::kY, n_spins);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    DenseOperator u = prop.at(t_grid[k]);
    r.cz[k] = (u.adjoint() * sz * u * sz).trace().real();
    r.cy[k] = (u.adjoint() * sy * u * sz).trace().real();
  }
  return r;
}

/// 2 sum_{m0 > 0} m0 <m(t)|S|m(t)> over basis states |m>, with per-sector series attached.
inline CorrelationRecord sector_correlations(const HamiltonianTerms& terms, int n_spins,
                                             const std::vector<double>& t_grid) {
  CorrelationRecord r = detail::make_record(n_spins, t_grid);
  Propagator prop(dense_hamiltonian(terms, n_spins));
  const DenseOperator sz = total_spin(Axis::kZ, n_spins);
  const DenseOperator sy = total_spin(Axis::kY, n_spins);
  const std::size_t dim = dimension_of(n_spins);
  std::vector<DenseOperator> u;
  u.reserve(t_grid.size());
  for (double t : t_grid) u.push_back(prop.at(t));
  for (std::size_t m = 0; m < dim; ++m) {
    const double m0 = basis_magnetization(m, n_spins);
    if (m0 <= 0) continue;
    SectorSeries series{m, m0, {}, {}};
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      Eigen::VectorXcd psi = u[k].col(static_cast<Eigen::Index>(m));
      double ez = psi.dot(sz * psi).real();  // dot() conjugates the left operand
      double ey = psi.dot(sy * psi).real();
      series.sz.push_back(ez);
      series.sy.push_back(ey);
      r.cz[k] += 2 * m0 * ez;
      r.cy[k] += 2 * m0 * ey;
    }
    r.per_sector.push_back(std::move(series));
  }
  return r;
}

/// Oracle spectrum; Gamma has no default on purpose.
inline Spectrum exact_spectrum(const CorrelationRecord& correlations, double gamma, const FrameConfig& frame) {
  require(!correlations.times.empty(), "exact_spectrum needs a non-empty time grid");
  require(std::isfinite(gamma) && gamma >= 0, "gamma must be >= 0");
  return spectrum_from_record(correlations, gamma, frame, false);
}

}  // namespace qnmr

#endif  // QNMR_EXACT_REFERENCE_HPP

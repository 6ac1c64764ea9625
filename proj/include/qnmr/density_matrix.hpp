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

// Density-matrix kernels and the depolarizing channel.

#ifndef QNMR_DENSITY_MATRIX_HPP
#define QNMR_DENSITY_MATRIX_HPP

#include "qnmr/circuit.hpp"

#include <span>
#include <vector>

namespace qnmr {

using DensityMatrix = DenseOperator;

/// |bits><bits| on n qubits.
inline DensityMatrix basis_density(std::size_t bits, int n_qubits) {
  check_dense_size(n_qubits);
  const std::size_t dim = dimension_of(n_qubits);
  require(bits < dim, "basis state out of range");
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(bits, bits) = 1.0;
  return rho;
}

/// rho <- U rho U^dag for a local U.
inline void apply_unitary(DensityMatrix& rho, const DenseOperator& local, std::span<const int> qubits) {
  apply_local_left(rho, local, qubits);
  apply_local_right_adjoint(rho, local, qubits);
}

inline void apply_unitary(DensityMatrix& rho, const Matrix2& local, int qubit) {
  const int q[1] = {qubit};
  apply_unitary(rho, DenseOperator(local), q);
}

inline Matrix2 rx_matrix(double angle) {
  Matrix2 m;
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, Complex(0, -s), Complex(0, -s), c;
  return m;
}

inline Matrix2 rz_matrix(double angle) {
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = std::exp(Complex(0, -angle / 2));
  m(1, 1) = std::exp(Complex(0, angle / 2));
  return m;
}

/// Strength p of rho -> (1-p) rho + p I/d (x) Tr_Q rho whose average gate infidelity is
/// epsilon: p = epsilon d / (d - 1).
inline double depolarizing_probability(double epsilon, int n_qubits) {
  require(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon < 1.0, "epsilon must lie in [0, 1)");
  require(n_qubits >= 1, "depolarizing channel needs at least one qubit");
  const double d = static_cast<double>(dimension_of(n_qubits));
  const double p = epsilon * d / (d - 1.0);
  require(p <= 1.0, "epsilon " + format_number(epsilon) + " exceeds the depolarizing range for " +
                        std::to_string(n_qubits) + " qubit(s)");
  return p;
}

/// rho -> (1-p) rho + p (I_Q/d_Q) (x) Tr_Q rho.
inline void depolarize(DensityMatrix& rho, double p, std::span<const int> qubits) {
  if (p == 0.0) return;
  const auto dim = static_cast<std::size_t>(rho.rows());
  const std::size_t block = std::size_t{1} << qubits.size();
  std::size_t mask = 0;
  for (int q : qubits) mask |= std::size_t{1} << q;
  auto spread = [&](std::size_t l) {
    std::size_t out = 0;
    for (std::size_t b = 0; b < qubits.size(); ++b) out |= ((l >> b) & 1u) << qubits[b];
    return out;
  };
  std::vector<std::size_t> offsets(block);
  for (std::size_t l = 0; l < block; ++l) offsets[l] = spread(l);
  const double keep = 1.0 - p;
  const double mix = p / static_cast<double>(block);
  for (std::size_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & mask) continue;
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & mask) continue;
      Complex partial{};
      for (std::size_t l = 0; l < block; ++l) partial += rho(r0 | offsets[l], c0 | offsets[l]);
      for (std::size_t a = 0; a < block; ++a) {
        for (std::size_t b = 0; b < block; ++b) {
          Complex& v = rho(r0 | offsets[a], c0 | offsets[b]);
          v = keep * v + (a == b ? mix * partial : Complex{});
        }
      }
    }
  }
}

inline double expectation(const DensityMatrix& rho, const DenseOperator& observable) {
  return (rho.cwiseProduct(observable.transpose())).sum().real();
}

inline double purity(const DensityMatrix& rho) { return (rho * rho).trace().real(); }

struct DensityDiagnostics {
  double hermiticity = 0.0;  // ||rho - rho^dag||_max
  double trace_error = 0.0;  // |Tr rho - 1|
  double min_eigenvalue = 0.0;
};

inline DensityDiagnostics diagnose(const DensityMatrix& rho) {
  DensityDiagnostics d;
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<DenseOperator> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

/// Liouville representation S with vec(E(rho)) = S vec(rho), column stacking.
template <typename Channel>
DenseOperator channel_superoperator(Channel&& channel, int n_qubits) {
  const std::size_t dim = dimension_of(n_qubits);
  DenseOperator s = DenseOperator::Zero(dim * dim, dim * dim);
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t r = 0; r < dim; ++r) {
      DensityMatrix unit = DensityMatrix::Zero(dim, dim);
      unit(r, c) = 1.0;
      channel(unit);
      for (std::size_t cc = 0; cc < dim; ++cc) {
        for (std::size_t rr = 0; rr < dim; ++rr) s(rr + cc * dim, r + c * dim) = unit(rr, cc);
      }
    }
  }
  return s;
}

/// Process fidelity with the identity, Tr S / d^2.
inline double process_fidelity(const DenseOperator& superop, int n_qubits) {
  const double d = static_cast<double>(dimension_of(n_qubits));
  return superop.trace().real() / (d * d);
}

/// F_avg = (d F_pro + 1) / (d + 1).
inline double average_gate_fidelity(const DenseOperator& superop, int n_qubits) {
  const double d = static_cast<double>(dimension_of(n_qubits));
  return (d * process_fidelity(superop, n_qubits) + 1.0) / (d + 1.0);
}

}  // namespace qnmr

#endif  // QNMR_DENSITY_MATRIX_HPP

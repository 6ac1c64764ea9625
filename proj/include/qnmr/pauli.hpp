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

// Spin-1/2 operator algebra.
//
// Conventions used everywhere in qnmr:
//   * qubit q is bit q of a basis index (little endian);
//   * bit value 0 is spin up, S^z|0> = +1/2 |0>;
//   * spin operators are S = sigma / 2.

#ifndef QNMR_PAULI_HPP
#define QNMR_PAULI_HPP

#include "qnmr/core.hpp"

#include <span>
#include <string>

namespace qnmr {

enum class Axis { kX, kY, kZ };

using Matrix2 = Eigen::Matrix2cd;

inline Matrix2 pauli_matrix(Axis axis) {
  Matrix2 m;
  switch (axis) {
    case Axis::kX:
      m << 0, 1, 1, 0;
      break;
    case Axis::kY:
      m << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case Axis::kZ:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

/// Lifts a local 2^k x 2^k operator on `qubits` (qubits[0] is the least significant local bit)
/// to the full 2^n space.
inline DenseOperator embed(const DenseOperator& local, std::span<const int> qubits, int n_qubits) {
  check_dense_size(n_qubits);
  const std::size_t dim = dimension_of(n_qubits);
  const int k = static_cast<int>(qubits.size());
  std::size_t mask = 0;
  for (int q : qubits) mask |= std::size_t{1} << q;
  DenseOperator full = DenseOperator::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t local_col = 0;
    for (int b = 0; b < k; ++b) local_col |= ((col >> qubits[b]) & 1u) << b;
    for (std::size_t local_row = 0; local_row < (std::size_t{1} << k); ++local_row) {
      Complex value = local(local_row, local_col);
      if (value == Complex{}) continue;
      std::size_t row = col & ~mask;
      for (int b = 0; b < k; ++b) row |= ((local_row >> b) & 1u) << qubits[b];
      full(row, col) += value;
    }
  }
  return full;
}

inline DenseOperator embed(const Matrix2& local, int qubit, int n_qubits) {
  const int qubits[1] = {qubit};
  return embed(DenseOperator(local), std::span<const int>(qubits), n_qubits);
}

/// S^a_i = sigma^a_i / 2.
inline DenseOperator spin_operator(Axis axis, int spin, int n_spins) {
  return embed(Matrix2(0.5 * pauli_matrix(axis)), spin, n_spins);
}

/// S^a_tot = sum_i S^a_i.
inline DenseOperator total_spin(Axis axis, int n_spins) {
  check_dense_size(n_spins);
  const std::size_t dim = dimension_of(n_spins);
  DenseOperator total = DenseOperator::Zero(dim, dim);
  for (int i = 0; i < n_spins; ++i) total += spin_operator(axis, i, n_spins);
  return total;
}

/// Magnetization m = (N - 2 popcount)/2 of a computational basis state.
inline double basis_magnetization(std::size_t bits, int n_spins) {
  int ones = 0;
  for (int q = 0; q < n_spins; ++q) ones += static_cast<int>((bits >> q) & 1u);
  return 0.5 * (n_spins - 2 * ones);
}

/// A tensor product of single-qubit Paulis written like "iXZ": character k acts on qubit k;
/// 'i' or 'I' is the identity.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::string label) : label_(std::move(label)) {
    require(!label_.empty(), "empty Pauli string");
    for (char& c : label_) {
      if (c == 'I') c = 'i';
      require(c == 'i' || c == 'X' || c == 'Y' || c == 'Z',
              "invalid Pauli character '" + std::string(1, c) + "' in " + label_);
    }
  }

  const std::string& label() const { return label_; }
  int n_qubits() const { return static_cast<int>(label_.size()); }

  DenseOperator matrix() const {
    check_dense_size(n_qubits());
    const std::size_t dim = dimension_of(n_qubits());
    DenseOperator m = DenseOperator::Identity(dim, dim);
    for (int q = 0; q < n_qubits(); ++q) {
      char c = label_[q];
      if (c == 'i') continue;
      Axis axis = c == 'X' ? Axis::kX : (c == 'Y' ? Axis::kY : Axis::kZ);
      m = embed(pauli_matrix(axis), q, n_qubits()) * m;
    }
    return m;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::string label_;
};

}  // namespace qnmr

#endif  // QNMR_PAULI_HPP

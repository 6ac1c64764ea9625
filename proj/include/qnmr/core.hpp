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

#ifndef QNMR_CORE_HPP
#define QNMR_CORE_HPP

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <system_error>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qnmr {

using Complex = std::complex<double>;

/// Dense complex matrix; the realization of every operator on 2^N states.
using DenseOperator = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kProtonGyromagneticRatio = 2.6752218744e8;  // rad s^-1 T^-1
inline constexpr int kMaxDenseSpins = 12;
inline constexpr std::string_view kVersion = "0.3.0";

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, violated precondition, or unrunnable configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested Hilbert space exceeds the dense-matrix guard.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to meet its accuracy contract.
class NumericError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

inline void check_dense_size(int n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxDenseSpins) {
    throw DimensionError("dense representation limited to " + std::to_string(kMaxDenseSpins) +
                         " spins, got " + std::to_string(n_qubits));
  }
}

inline std::size_t dimension_of(int n_qubits) { return std::size_t{1} << n_qubits; }

/// Shortest round-trip decimal form; stable across runs, used for all data files.
inline std::string format_number(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

/// Operator-norm distance after removing the best global phase, ||U - e^{iφ}V||_2.
inline double phase_aligned_distance(const DenseOperator& u, const DenseOperator& v) {
  Complex overlap = (v.adjoint() * u).trace();
  Complex phase = std::abs(overlap) > 1e-300 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  DenseOperator diff = u - phase * v;
  Eigen::JacobiSVD<DenseOperator> svd(diff);
  return svd.singularValues()(0);
}

/// Largest singular value.
inline double operator_norm(const DenseOperator& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<DenseOperator> svd(a);
  return svd.singularValues()(0);
}

/// Trace norm ||A||_1 of a Hermitian matrix (sum of absolute eigenvalues).
inline double hermitian_trace_norm(const DenseOperator& a) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

namespace detail {

inline std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string strip_comment(const std::string& line) {
  return trim(std::string_view(line).substr(0, line.find('#')));
}

inline double parse_double(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("cannot parse number '" + token + "' in " + context);
  }
  return value;
}

inline std::uint64_t parse_uint64(const std::string& token, const std::string& context) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError("cannot parse unsigned integer '" + token + "' in " + context);
  }
  return value;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

}  // namespace detail

}  // namespace qnmr

#endif  // QNMR_CORE_HPP

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

#ifndef QNMR_CORRELATION_HPP
#define QNMR_CORRELATION_HPP

#include "qnmr/core.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace qnmr {

/// Magnetization time series of one initial basis state |m>, m0 > 0.
struct SectorSeries {
  std::uint64_t basis_state = 0;
  double m0 = 0.0;
  std::vector<double> sz;  // <m(t)| S^z_tot |m(t)>
  std::vector<double> sy;  // <m(t)| S^y_tot |m(t)>
};

/// C_z(t) = Tr{S^z_tot(t) S^z_tot}, C_y(t) = Tr{S^y_tot(t) S^z_tot} on the grid t_k = k tau.
///
/// `n_measured` counts the leading samples that carry data; anything after it is zero padding.
struct CorrelationRecord {
  int n_spins = 0;
  double tau = 0.0;
  std::vector<double> times;
  std::vector<double> cz;
  std::vector<double> cy;
  std::size_t n_measured = 0;
  std::vector<SectorSeries> per_sector;

  std::size_t size() const { return times.size(); }

  void validate() const {
    require(!times.empty(), "correlation record is empty");
    require(cz.size() == times.size() && cy.size() == times.size(),
            "correlation series lengths differ from the time grid");
    require(n_measured >= 1 && n_measured <= times.size(), "n_measured out of range");
    require(std::isfinite(tau) && tau > 0, "correlation record needs tau > 0");
    for (std::size_t k = 0; k < times.size(); ++k) {
      require(std::abs(times[k] - static_cast<double>(k) * tau) <= 1e-9 * (1.0 + times[k]),
              "correlation times must lie on the grid k*tau");
    }
  }
};

inline std::vector<double> uniform_grid(std::size_t n_points, double tau) {
  std::vector<double> t(n_points);
  for (std::size_t k = 0; k < n_points; ++k) t[k] = static_cast<double>(k) * tau;
  return t;
}

/// Columns t,C_z,C_y in shortest round-trip form.
inline void write_correlations_csv(std::ostream& out, const CorrelationRecord& record) {
  out << "t,C_z,C_y\n";
  for (std::size_t k = 0; k < record.size(); ++k) {
    out << format_number(record.times[k]) << ',' << format_number(record.cz[k]) << ','
        << format_number(record.cy[k]) << '\n';
  }
}

}  // namespace qnmr

#endif  // QNMR_CORRELATION_HPP

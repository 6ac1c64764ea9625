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

// Liquid-state NMR spin Hamiltonians and their rotating-frame form.
//
// The static field points along x. In the frame rotating with the Larmor frequency and
// centered on a reference shift, the Hamiltonian is
//
//   H = sum_i w_i S^x_i + sum_{i<j} 2 pi J_ij S_i . S_j,   w_i = -gamma B (delta_i - delta_ref) 1e-6
//
// with all frequencies in rad/s.

#ifndef QNMR_SPIN_SYSTEM_HPP
#define QNMR_SPIN_SYSTEM_HPP

#include "qnmr/core.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace qnmr {

/// Physical description of a molecule's spin-1/2 nuclei.
class MoleculeSpec {
 public:
  MoleculeSpec(std::string name, std::vector<double> shifts_ppm, Eigen::MatrixXd couplings_hz,
               double field_tesla, double gyromagnetic_ratio = kProtonGyromagneticRatio)
      : name_(std::move(name)),
        shifts_ppm_(std::move(shifts_ppm)),
        couplings_hz_(std::move(couplings_hz)),
        field_tesla_(field_tesla),
        gyromagnetic_ratio_(gyromagnetic_ratio) {
    const auto n = static_cast<Eigen::Index>(shifts_ppm_.size());
    require(n >= 1, "molecule needs at least one spin");
    require(couplings_hz_.rows() == n && couplings_hz_.cols() == n,
            "coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    require(std::isfinite(field_tesla_) && field_tesla_ > 0, "field_tesla must be positive");
    require(std::isfinite(gyromagnetic_ratio_) && gyromagnetic_ratio_ != 0,
            "gyromagnetic ratio must be finite and nonzero");
    for (double d : shifts_ppm_) require(std::isfinite(d), "chemical shifts must be finite");
    for (Eigen::Index i = 0; i < n; ++i) {
      require(couplings_hz_(i, i) == 0.0, "coupling matrix diagonal must be zero");
      for (Eigen::Index j = 0; j < n; ++j) {
        require(std::isfinite(couplings_hz_(i, j)), "couplings must be finite");
        require(couplings_hz_(i, j) == couplings_hz_(j, i), "coupling matrix must be symmetric");
      }
    }
  }

  const std::string& name() const { return name_; }
  int n_spins() const { return static_cast<int>(shifts_ppm_.size()); }
  const std::vector<double>& shifts_ppm() const { return shifts_ppm_; }
  const Eigen::MatrixXd& couplings_hz() const { return couplings_hz_; }
  double field_tesla() const { return field_tesla_; }
  double gyromagnetic_ratio() const { return gyromagnetic_ratio_; }

  double mean_shift_ppm() const {
    return std::accumulate(shifts_ppm_.begin(), shifts_ppm_.end(), 0.0) / n_spins();
  }

 private:
  std::string name_;
  std::vector<double> shifts_ppm_;
  Eigen::MatrixXd couplings_hz_;
  double field_tesla_;
  double gyromagnetic_ratio_;
};

/// gamma B / 2 pi, the spectrometer frequency in Hz.
inline double larmor_frequency_hz(const MoleculeSpec& spec) {
  return spec.gyromagnetic_ratio() * spec.field_tesla() / (2 * kPi);
}

/// Rotating-frame center. `larmor_hz` converts angular offsets to ppm.
struct FrameConfig {
  double reference_ppm = 0.0;
  double larmor_hz = 0.0;

  /// Frame centered on the mean chemical shift.
  static FrameConfig centered(const MoleculeSpec& spec) {
    return {spec.mean_shift_ppm(), larmor_frequency_hz(spec)};
  }
  static FrameConfig at(const MoleculeSpec& spec, double reference_ppm) {
    require(std::isfinite(reference_ppm), "reference_ppm must be finite");
    return {reference_ppm, larmor_frequency_hz(spec)};
  }

  double ppm_from_rad_s(double omega) const {
    return reference_ppm + omega / (2 * kPi * larmor_hz * 1e-6);
  }
};

struct OnsiteTerm {
  int spin = 0;
  double omega = 0.0;  // rad/s, multiplies S^x_spin

  friend bool operator==(const OnsiteTerm&, const OnsiteTerm&) = default;
};

struct PairTerm {
  int i = 0;
  int j = 0;
  double coupling = 0.0;  // 2 pi J_ij in rad/s, multiplies S_i . S_j

  friend bool operator==(const PairTerm&, const PairTerm&) = default;
};

/// The partial Hamiltonians a Trotter step is built from.
struct HamiltonianTerms {
  int n_spins = 0;
  std::vector<OnsiteTerm> onsite;
  std::vector<PairTerm> pairs;

  void validate() const {
    require(n_spins >= 1, "terms need at least one spin");
    for (const auto& t : onsite) {
      require(t.spin >= 0 && t.spin < n_spins, "onsite index out of range");
      require(std::isfinite(t.omega), "onsite frequency must be finite");
    }
    for (const auto& p : pairs) {
      require(p.i >= 0 && p.i < p.j && p.j < n_spins, "pair indices must satisfy 0 <= i < j < N");
      require(std::isfinite(p.coupling), "pair coupling must be finite");
    }
  }

  friend bool operator==(const HamiltonianTerms&, const HamiltonianTerms&) = default;
};

inline HamiltonianTerms build_rotating_frame_terms(const MoleculeSpec& spec, const FrameConfig& frame) {
  require(std::isfinite(frame.reference_ppm), "reference_ppm must be finite");
  HamiltonianTerms terms;
  terms.n_spins = spec.n_spins();
  const double gamma_b = spec.gyromagnetic_ratio() * spec.field_tesla();
  for (int i = 0; i < spec.n_spins(); ++i) {
    terms.onsite.push_back({i, -gamma_b * (spec.shifts_ppm()[i] - frame.reference_ppm) * 1e-6});
  }
  for (int i = 0; i < spec.n_spins(); ++i) {
    for (int j = i + 1; j < spec.n_spins(); ++j) {
      double j_hz = spec.couplings_hz()(i, j);
      if (j_hz != 0.0) terms.pairs.push_back({i, j, 2 * kPi * j_hz});
    }
  }
  return terms;
}

struct CouplingReduction {
  HamiltonianTerms terms;
  std::vector<PairTerm> removed;
};

/// Drops every pair with |2 pi J| below `threshold_rad_s`.
inline CouplingReduction reduce_couplings(const HamiltonianTerms& terms, double threshold_rad_s) {
  require(threshold_rad_s >= 0, "reduction threshold must be non-negative");
  CouplingReduction out;
  out.terms.n_spins = terms.n_spins;
  out.terms.onsite = terms.onsite;
  for (const auto& p : terms.pairs) {
    if (std::abs(p.coupling) < threshold_rad_s) {
      out.removed.push_back(p);
    } else {
      out.terms.pairs.push_back(p);
    }
  }
  return out;
}

namespace molecules {

/// cis-3-chloroacrylic acid, the two non-exchangeable protons.
inline MoleculeSpec cis_3_chloroacrylic_acid(double field_tesla = 11.7) {
  Eigen::MatrixXd j(2, 2);
  j << 0, 7.92, 7.92, 0;
  return MoleculeSpec("cis-3-chloroacrylic acid", {6.375, 6.302}, j, field_tesla);
}

/// 1,2,4-trichlorobenzene.
inline MoleculeSpec trichlorobenzene(double field_tesla = 11.7) {
  Eigen::MatrixXd j(3, 3);
  j << 0, 8.5, 2.5, 8.5, 0, 0.5, 2.5, 0.5, 0;
  return MoleculeSpec("1,2,4-trichlorobenzene", {7.194, 7.377, 7.467}, j, field_tesla);
}

}  // namespace molecules

}  // namespace qnmr

#endif  // QNMR_SPIN_SYSTEM_HPP

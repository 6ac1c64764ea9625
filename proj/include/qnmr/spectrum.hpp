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

// Correlation record -> spectrum.
//
//   A(w) = tau * sum_j w_j e^{-Gamma t_j} [ C_z(t_j) cos(w t_j) + C_y(t_j) sin(w t_j) ]
//
// which is Re{...C_z} - Im{...C_y} of the half-line transform, discretized with trapezoid
// weights w_0 = 1/2, w_j = 1 (the record is a truncation, not a closed interval).
// The grid is w_k = (2k - L) pi / (L tau), k = 0..L-1, L the record length after padding;
// it contains w = 0 and mirrors bin k onto bin L - k exactly.

#ifndef QNMR_SPECTRUM_HPP
#define QNMR_SPECTRUM_HPP

#include "qnmr/correlation.hpp"
#include "qnmr/spin_system.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <ostream>
#include <vector>

namespace qnmr {

struct SpectrumMetadata {
  double tau = 0.0;
  std::size_t n_steps = 0;
  std::size_t padded_length = 0;
  double gamma_window = 0.0;
  bool symmetrized = false;
  double reference_ppm = 0.0;
  double larmor_hz = 0.0;
};

struct Spectrum {
  std::vector<double> freq_rad_s;
  std::vector<double> freq_ppm;
  std::vector<double> amplitude;
  SpectrumMetadata meta;

  std::size_t size() const { return amplitude.size(); }
  double bin_width() const { return 2 * kPi / (static_cast<double>(meta.padded_length) * meta.tau); }
};

/// Appends exact zeros; the time grid continues at the same spacing.
inline CorrelationRecord zero_pad(const CorrelationRecord& record, std::size_t target_length) {
  require(target_length >= record.size(), "zero_pad cannot shrink a record (" +
                                              std::to_string(record.size()) + " -> " +
                                              std::to_string(target_length) + ")");
  CorrelationRecord out = record;
  out.times = uniform_grid(target_length, record.tau);
  out.cz.resize(target_length, 0.0);
  out.cy.resize(target_length, 0.0);
  return out;
}

/// Smallest power of two >= 8 n.
inline std::size_t default_padded_length(std::size_t n) { return std::bit_ceil(8 * std::max<std::size_t>(n, 1)); }

inline Spectrum spectrum_from_record(const CorrelationRecord& record, double gamma_window,
                                     const FrameConfig& frame, bool symmetrize) {
  record.validate();
  require(std::isfinite(gamma_window) && gamma_window >= 0, "gamma window must be >= 0");
  const std::size_t length = record.size();
  const std::size_t used = record.n_measured;
  const double tau = record.tau;

  // Samples beyond n_measured are zero by construction and skipped.
  std::vector<Complex> weighted(used);
  for (std::size_t j = 0; j < used; ++j) {
    double w = (j == 0 ? 0.5 : 1.0) * std::exp(-gamma_window * record.times[j]);
    weighted[j] = w * Complex(record.cz[j], symmetrize ? 0.0 : record.cy[j]);
  }

  Spectrum s;
  s.freq_rad_s.resize(length);
  s.freq_ppm.resize(length);
  s.amplitude.resize(length);
  const double l = static_cast<double>(length);
  for (std::size_t k = 0; k < length; ++k) {
    const double phase = (2.0 * static_cast<double>(k) - l) * kPi / l;  // w_k tau
    const double omega = phase / tau;
    // Horner in z = e^{-i w tau}; conjugate-exact for mirrored bins.
    const Complex z(std::cos(phase), -std::sin(phase));
    Complex acc{};
    for (std::size_t j = used; j-- > 0;) acc = acc * z + weighted[j];
    s.freq_rad_s[k] = omega;
    s.freq_ppm[k] = frame.ppm_from_rad_s(omega);
    s.amplitude[k] = tau * acc.real();
  }
  s.meta = {tau, used > 0 ? used - 1 : 0, length, gamma_window, symmetrize, frame.reference_ppm,
            frame.larmor_hz};
  return s;
}

struct Peak {
  std::size_t index = 0;
  double omega = 0.0;      // parabola vertex, rad/s
  double ppm = 0.0;
  double amplitude = 0.0;  // parabola vertex value
};

/// Local maxima above `relative_threshold` times the global maximum, refined by a
/// three-point parabola. Sorted by frequency.
inline std::vector<Peak> find_peaks(const Spectrum& s, double relative_threshold = 0.05) {
  std::vector<Peak> peaks;
  if (s.size() < 3) return peaks;
  const double top = *std::max_element(s.amplitude.begin(), s.amplitude.end());
  if (!(top > 0)) return peaks;
  const double dw = s.freq_rad_s[1] - s.freq_rad_s[0];
  const double ppm_per_bin = s.freq_ppm[1] - s.freq_ppm[0];
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double a = s.amplitude[k - 1], b = s.amplitude[k], c = s.amplitude[k + 1];
    if (!(b > a && b >= c && b > relative_threshold * top)) continue;
    const double curvature = a - 2 * b + c;
    double offset = 0.0, value = b;
    if (curvature < 0) {
      offset = 0.5 * (a - c) / curvature;
      value = b - 0.25 * (a - c) * offset;
    }
    peaks.push_back({k, s.freq_rad_s[k] + offset * dw, s.freq_ppm[k] + offset * ppm_per_bin, value});
  }
  return peaks;
}

inline std::size_t tallest_peak_index(const Spectrum& s) {
  require(s.size() > 0, "empty spectrum");
  return static_cast<std::size_t>(std::max_element(s.amplitude.begin(), s.amplitude.end()) -
                                  s.amplitude.begin());
}

/// Full width at half maximum of the peak at bin `index`, in rad/s, with linear interpolation
/// of both half-maximum crossings.
inline double peak_fwhm(const Spectrum& s, std::size_t index) {
  require(index < s.size(), "peak index out of range");
  const double half = 0.5 * s.amplitude[index];
  require(half > 0, "peak_fwhm needs a positive peak");
  std::size_t left = index;
  while (left > 0 && s.amplitude[left] > half) --left;
  std::size_t right = index;
  while (right + 1 < s.size() && s.amplitude[right] > half) ++right;
  if (s.amplitude[left] > half || s.amplitude[right] > half) {
    throw NumericError("peak does not fall to half maximum inside the spectral window");
  }
  auto cross = [&](std::size_t lo, std::size_t hi) {
    const double a = s.amplitude[lo], b = s.amplitude[hi];
    return s.freq_rad_s[lo] + (half - a) / (b - a) * (s.freq_rad_s[hi] - s.freq_rad_s[lo]);
  };
  return cross(right - 1, right) - cross(left, left + 1);
}

/// sum_k A(w_k) dw.
inline double integrated_area(const Spectrum& s) {
  double total = 0.0;
  for (double a : s.amplitude) total += a;
  return total * s.bin_width();
}

inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "ppm,rad_s,amplitude\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out << format_number(s.freq_ppm[k]) << ',' << format_number(s.freq_rad_s[k]) << ','
        << format_number(s.amplitude[k]) << '\n';
  }
}

/// Two whitespace-separated columns (ppm, amplitude) for gnuplot and friends.
inline void write_spectrum_plot_text(std::ostream& out, const Spectrum& s) {
  out << "# ppm amplitude\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out << format_number(s.freq_ppm[k]) << ' ' << format_number(s.amplitude[k]) << '\n';
  }
}

inline nlohmann::ordered_json spectrum_metadata_json(const Spectrum& s) {
  nlohmann::ordered_json j;
  j["tau_s"] = s.meta.tau;
  j["n_steps"] = s.meta.n_steps;
  j["padded_length"] = s.meta.padded_length;
  j["gamma_window_s_inv"] = s.meta.gamma_window;
  j["symmetrized"] = s.meta.symmetrized;
  j["reference_ppm"] = s.meta.reference_ppm;
  j["larmor_hz"] = s.meta.larmor_hz;
  j["bin_width_rad_s"] = s.bin_width();
  j["omega_min_rad_s"] = s.freq_rad_s.empty() ? 0.0 : s.freq_rad_s.front();
  j["omega_max_rad_s"] = s.freq_rad_s.empty() ? 0.0 : s.freq_rad_s.back();
  j["n_bins"] = s.size();
  return j;
}

}  // namespace qnmr

#endif  // QNMR_SPECTRUM_HPP

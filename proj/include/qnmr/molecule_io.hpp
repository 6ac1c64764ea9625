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

// Plain-text molecule files.
//
//   name = cis-3-chloroacrylic acid
//   field_tesla = 11.7
//   gyromagnetic_ratio = 2.6752218744e8     (optional)
//   reference_ppm = 6.3385                  (optional)
//   shifts_ppm = 6.375 6.302
//   couplings_hz:
//     0    7.92
//     .    0
//
// The coupling block has one row per spin. A '.' stands for the mirrored entry, so an
// upper-triangle listing is enough. '#' starts a comment.

#ifndef QNMR_MOLECULE_IO_HPP
#define QNMR_MOLECULE_IO_HPP

#include "qnmr/spin_system.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qnmr {

struct MoleculeFile {
  MoleculeSpec spec;
  std::optional<double> reference_ppm;

  FrameConfig frame() const {
    return reference_ppm ? FrameConfig::at(spec, *reference_ppm) : FrameConfig::centered(spec);
  }
};

inline MoleculeFile parse_molecule(std::istream& in) {
  std::string name;
  std::optional<double> field, gyro, reference;
  std::vector<double> shifts;
  std::vector<std::vector<std::string>> rows;
  bool in_block = false;
  int line_no = 0;

  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (in_block && eq == std::string::npos && line.back() != ':') {
      rows.push_back(detail::split_ws(line));
      continue;
    }
    in_block = false;
    if (line == "couplings_hz:") {
      require(rows.empty(), "duplicate couplings_hz block at " + where);
      in_block = true;
      continue;
    }
    require(eq != std::string::npos, "expected 'key = value' at " + where);
    std::string key = detail::trim(std::string_view(line).substr(0, eq));
    std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key == "name") {
      name = value;
    } else if (key == "field_tesla") {
      field = detail::parse_double(value, where);
    } else if (key == "gyromagnetic_ratio") {
      gyro = detail::parse_double(value, where);
    } else if (key == "reference_ppm") {
      reference = detail::parse_double(value, where);
    } else if (key == "shifts_ppm") {
      for (const auto& tok : detail::split_ws(value)) shifts.push_back(detail::parse_double(tok, where));
    } else {
      throw ConfigError("unknown key '" + key + "' at " + where);
    }
  }

  require(!shifts.empty(), "molecule file has no shifts_ppm");
  require(field.has_value(), "molecule file has no field_tesla");
  const auto n = static_cast<Eigen::Index>(shifts.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  if (n > 1 || !rows.empty()) {
    require(static_cast<Eigen::Index>(rows.size()) == n,
            "couplings_hz needs " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));
  }
  std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(rows.size()); ++r) {
    require(static_cast<Eigen::Index>(rows[r].size()) == n,
            "couplings_hz row " + std::to_string(r) + " needs " + std::to_string(n) + " entries");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (rows[r][c] == ".") continue;
      j(r, c) = detail::parse_double(rows[r][c], "couplings_hz row " + std::to_string(r));
      given[r][c] = true;
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    require(j(r, r) == 0.0, "coupling matrix diagonal must be zero");
    for (Eigen::Index c = r + 1; c < n; ++c) {
      if (given[r][c] && given[c][r]) {
        require(j(r, c) == j(c, r), "asymmetric couplings at (" + std::to_string(r) + "," +
                                        std::to_string(c) + ")");
      } else if (given[c][r]) {
        j(r, c) = j(c, r);
      } else {
        j(c, r) = j(r, c);
      }
    }
  }
  MoleculeSpec spec(name, shifts, j, *field, gyro.value_or(kProtonGyromagneticRatio));
  return {std::move(spec), reference};
}

inline MoleculeFile load_molecule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open molecule file " + path);
  return parse_molecule(in);
}

inline void write_molecule(std::ostream& out, const MoleculeSpec& spec,
                           std::optional<double> reference_ppm = std::nullopt) {
  out << "name = " << spec.name() << "\n";
  out << "field_tesla = " << format_number(spec.field_tesla()) << "\n";
  out << "gyromagnetic_ratio = " << format_number(spec.gyromagnetic_ratio()) << "\n";
  if (reference_ppm) out << "reference_ppm = " << format_number(*reference_ppm) << "\n";
  out << "shifts_ppm =";
  for (double d : spec.shifts_ppm()) out << " " << format_number(d);
  out << "\ncouplings_hz:\n";
  for (int r = 0; r < spec.n_spins(); ++r) {
    out << " ";
    for (int c = 0; c < spec.n_spins(); ++c) {
      out << " " << (c < r ? std::string(".") : format_number(spec.couplings_hz()(r, c)));
    }
    out << "\n";
  }
}

}  // namespace qnmr

#endif  // QNMR_MOLECULE_IO_HPP

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

// Lindblad master equation with a rate matrix over Pauli-string noise operators.
//
//   d rho/dt = -i[H, rho] + sum_ab gamma_ab ( O_a rho O_b^dag - 1/2 {O_b^dag O_a, rho} )
//
// Two-time correlations follow the quantum regression theorem: <A(t) B> = Tr{A e^{Lt}(B rho0)}
// with rho0 = I/2^N, scaled by 2^N so that the t = 0 value is Tr{AB}.

#ifndef QNMR_LINDBLAD_HPP
#define QNMR_LINDBLAD_HPP

#include "qnmr/correlation.hpp"
#include "qnmr/exact_reference.hpp"
#include "qnmr/noise_budget.hpp"
#include "qnmr/pauli.hpp"

#include <fstream>
#include <map>
#include <optional>

namespace qnmr {

/// Which product enters the anticommutator. kTracePreserving uses O_b^dag O_a; kAsWritten
/// uses O_a O_b^dag, which agrees for diagonal rates and for commuting operator pairs.
enum class AnticommutatorOrder { kTracePreserving, kAsWritten };

class LindbladModel {
 public:
  LindbladModel(DenseOperator hamiltonian, std::vector<DenseOperator> ops, DenseOperator gamma,
                std::vector<std::string> labels = {},
                AnticommutatorOrder order = AnticommutatorOrder::kTracePreserving)
      : h_(std::move(hamiltonian)), ops_(std::move(ops)), gamma_(std::move(gamma)), labels_(std::move(labels)),
        order_(order) {
    require(h_.rows() == h_.cols() && h_.rows() > 0, "Hamiltonian must be square and non-empty");
    for (const auto& o : ops_) require(o.rows() == h_.rows() && o.cols() == h_.cols(), "noise operator dimension mismatch");
    const auto k = static_cast<Eigen::Index>(ops_.size());
    require(gamma_.rows() == k && gamma_.cols() == k, "rate matrix must be " + std::to_string(k) + "x" + std::to_string(k));
    require(labels_.empty() || labels_.size() == ops_.size(), "one label per noise operator");
    if (k > 0) {
      const double scale = std::max(1.0, gamma_.cwiseAbs().maxCoeff());
      require((gamma_ - gamma_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "rate matrix must be Hermitian");
      Eigen::SelfAdjointEigenSolver<DenseOperator> solver(0.5 * (gamma_ + gamma_.adjoint()), Eigen::EigenvaluesOnly);
      require(solver.eigenvalues().minCoeff() >= -1e-10 * scale, "rate matrix must be positive semidefinite");
    }
  }

  /// Noise-free model.
  explicit LindbladModel(DenseOperator hamiltonian)
      : LindbladModel(std::move(hamiltonian), {}, DenseOperator::Zero(0, 0)) {}

  const DenseOperator& hamiltonian() const { return h_; }
  const std::vector<DenseOperator>& ops() const { return ops_; }
  const DenseOperator& gamma() const { return gamma_; }
  const std::vector<std::string>& labels() const { return labels_; }
  AnticommutatorOrder order() const { return order_; }
  Eigen::Index dim() const { return h_.rows(); }

 private:
  DenseOperator h_;
  std::vector<DenseOperator> ops_;
  DenseOperator gamma_;
  std::vector<std::string> labels_;
  AnticommutatorOrder order_;
};

inline DenseOperator master_rhs(const DenseOperator& rho, const LindbladModel& model) {
  require(rho.rows() == model.dim() && rho.cols() == model.dim(), "density matrix dimension mismatch");
  const Complex i(0, 1);
  const DenseOperator& h = model.hamiltonian();
  DenseOperator out = -i * (h * rho - rho * h);
  const auto& ops = model.ops();
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      const Complex g = model.gamma()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (g == Complex{}) continue;
      const DenseOperator ob_dag = ops[b].adjoint();
      const DenseOperator prod = model.order() == AnticommutatorOrder::kTracePreserving ? (ob_dag * ops[a]).eval()
                                                                                         : (ops[a] * ob_dag).eval();
      out += g * (ops[a] * rho * ob_dag - 0.5 * (prod * rho + rho * prod));
    }
  }
  return out;
}

/// Superoperator acting on column-stacked vec(rho).
inline DenseOperator liouvillian(const LindbladModel& model) {
  const Eigen::Index d = model.dim();
  DenseOperator l(d * d, d * d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      DenseOperator unit = DenseOperator::Zero(d, d);
      unit(r, c) = 1.0;
      DenseOperator image = master_rhs(unit, model);
      l.col(r + c * d) = Eigen::Map<const Eigen::VectorXcd>(image.data(), d * d);
    }
  }
  return l;
}

inline double trace_distance(const DenseOperator& a, const DenseOperator& b) {
  Eigen::JacobiSVD<DenseOperator> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

struct IntegrationOptions {
  double tolerance = 1e-8;  // final-state trace distance between step h and h/2
  int max_refinements = 30;
};

namespace detail {

/// One RK4 step for the linear system x' = L x, as a matrix.
inline DenseOperator rk4_step_matrix(const DenseOperator& l, double h) {
  const auto n = l.rows();
  DenseOperator term = DenseOperator::Identity(n, n);
  DenseOperator total = term;
  for (int k = 1; k <= 4; ++k) {
    term = (term * l * (h / k)).eval();
    total += term;
  }
  return total;
}

inline std::vector<DenseOperator> propagate(const DenseOperator& l, const DenseOperator& x0,
                                            const std::vector<double>& t_grid, int level) {
  const Eigen::Index d = x0.rows();
  std::vector<DenseOperator> out;
  out.reserve(t_grid.size());
  out.push_back(x0);
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(x0.data(), d * d);
  std::optional<double> cached_dt;
  DenseOperator step;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    if (!cached_dt || std::abs(dt - *cached_dt) > 1e-12 * dt) {
      // 2^level RK4 substeps per interval, composed by repeated squaring.
      step = rk4_step_matrix(l, std::ldexp(dt, -level));
      for (int s = 0; s < level; ++s) step = (step * step).eval();
      cached_dt = dt;
    }
    x = step * x;
    out.push_back(Eigen::Map<const DenseOperator>(x.data(), d, d));
  }
  return out;
}

}  // namespace detail

/// Fixed-step RK4 on the grid, refined by step doubling until the final state moves by less
/// than the tolerance in trace distance.
inline std::vector<DenseOperator> integrate(const LindbladModel& model, const DenseOperator& rho0,
                                            const std::vector<double>& t_grid, const IntegrationOptions& options = {}) {
  require(rho0.rows() == model.dim() && rho0.cols() == model.dim(), "initial state dimension mismatch");
  require(!t_grid.empty(), "time grid is empty");
  double min_dt = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    require(t_grid[k] > t_grid[k - 1], "time grid must be strictly ascending");
    min_dt = std::min(min_dt, t_grid[k] - t_grid[k - 1]);
  }
  if (t_grid.size() == 1) return {rho0};
  const DenseOperator l = liouvillian(model);
  const double norm = l.cwiseAbs().colwise().sum().maxCoeff();
  double max_dt = 0.0;
  for (std::size_t k = 1; k < t_grid.size(); ++k) max_dt = std::max(max_dt, t_grid[k] - t_grid[k - 1]);
  int level = 0;
  while (std::ldexp(max_dt, -level) * norm > 1.0 && level < 60) ++level;
  auto coarse = detail::propagate(l, rho0, t_grid, level);
  for (int r = 0; r < options.max_refinements; ++r) {
    auto fine = detail::propagate(l, rho0, t_grid, level + 1);
    if (trace_distance(coarse.back(), fine.back()) < options.tolerance) return fine;
    coarse = std::move(fine);
    ++level;
  }
  throw NumericError("Lindblad integration did not reach the requested tolerance");
}

/// <A(t) B> with rho0 = I/2^N, scaled by 2^N.
inline std::vector<Complex> regression_correlation(const LindbladModel& model, const DenseOperator& a,
                                                   const DenseOperator& b, const std::vector<double>& t_grid,
                                                   const IntegrationOptions& options = {}) {
  const Eigen::Index d = model.dim();
  require(a.rows() == d && a.cols() == d && b.rows() == d && b.cols() == d, "observable dimension mismatch");
  // B rho0 2^N = B.
  auto traj = integrate(model, b, t_grid, options);
  std::vector<Complex> out;
  out.reserve(traj.size());
  for (const auto& x : traj) out.push_back((a * x).trace());
  return out;
}

struct EnvelopeFit {
  double rate = 0.0;       // s^-1, >= 0
  double residual = 0.0;   // RMS of log-residuals
  std::size_t n_points = 0;
  bool decaying = false;
};

/// Log-linear least squares on the local maxima of |values|, each refined by a parabola.
/// Falls back to all samples when fewer than three maxima exist.
inline EnvelopeFit fit_envelope_rate(const std::vector<double>& times, const std::vector<double>& values) {
  require(times.size() == values.size(), "times and values differ in length");
  const std::size_t n = values.size();
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = std::abs(values[k]);
  std::vector<double> xs, ys;
  auto push = [&](double t, double v) {
    if (v > 0) {
      xs.push_back(t);
      ys.push_back(std::log(v));
    }
  };
  if (n >= 2 && m[0] >= m[1]) push(times[0], m[0]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(m[k] > m[k - 1] && m[k] >= m[k + 1])) continue;
    const double a = m[k - 1], b = m[k], c = m[k + 1];
    const double curvature = a - 2 * b + c;
    double offset = 0.0, value = b;
    if (curvature < 0) {
      offset = 0.5 * (a - c) / curvature;
      value = b - 0.25 * (a - c) * offset;
    }
    const double dt = 0.5 * (times[k + 1] - times[k - 1]);
    push(times[k] + offset * dt, value);
  }
  if (xs.size() < 3) {
    xs.clear();
    ys.clear();
    for (std::size_t k = 0; k < n; ++k) push(times[k], m[k]);
  }
  EnvelopeFit fit;
  fit.n_points = xs.size();
  if (xs.size() < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= xs.size();
  my /= xs.size();
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx <= 0) return fit;
  const double slope = sxy / sxx;
  double ss = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (my + slope * (xs[k] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / xs.size());
  fit.decaying = slope < 0;
  fit.rate = fit.decaying ? -slope : 0.0;
  return fit;
}

struct EomEstimate {
  double rate = 0.0;       // fitted envelope decay of C_z, s^-1
  double residual = 0.0;
  bool decaying = false;
  double gamma_eff = 0.0;  // budget reference, s^-1
};

/// Fits the decay of C_z(t) = <S^z_tot(t) S^z_tot> under the model.
inline EomEstimate broadening_estimate(const LindbladModel& model, int n_spins, const std::vector<double>& t_grid,
                                       double gamma_eff_reference, const IntegrationOptions& options = {}) {
  require(static_cast<std::size_t>(model.dim()) == dimension_of(n_spins), "model dimension does not match n_spins");
  const DenseOperator sz = total_spin(Axis::kZ, n_spins);
  auto c = regression_correlation(model, sz, sz, t_grid, options);
  std::vector<double> re(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) re[k] = c[k].real();
  auto fit = fit_envelope_rate(t_grid, re);
  return {fit.rate, fit.residual, fit.decaying, gamma_eff_reference};
}

/// Uniform depolarizing rate on every qubit: Pauli X, Y, Z each at `rate`, so every Bloch
/// component decays at 4 rate.
inline LindbladModel depolarizing_model(const DenseOperator& hamiltonian, int n_spins, const std::vector<double>& rates) {
  require(static_cast<int>(rates.size()) == n_spins, "one rate per spin");
  std::vector<DenseOperator> ops;
  std::vector<std::string> labels;
  std::vector<double> diag;
  for (int q = 0; q < n_spins; ++q) {
    if (rates[q] == 0.0) continue;
    for (char p : {'X', 'Y', 'Z'}) {
      std::string label(n_spins, 'i');
      label[q] = p;
      labels.push_back(label);
      ops.push_back(PauliString(label).matrix());
      diag.push_back(rates[q]);
    }
  }
  DenseOperator gamma = DenseOperator::Zero(ops.size(), ops.size());
  for (std::size_t k = 0; k < diag.size(); ++k) gamma(k, k) = diag[k];
  return LindbladModel(hamiltonian, std::move(ops), std::move(gamma), std::move(labels));
}

/// Rescaled per-qubit Bloch decay rates gamma~ from a budget: each entry contributes
/// gamma t_gate / tau to each of its qubits, with gamma from the error/rate bridge.
/// `physical_to_logical` maps budget qubits to spins (identity when empty).
inline std::vector<double> budget_qubit_rates(const ErrorBudget& budget, const std::vector<int>& physical_to_logical = {},
                                              double default_t_gate = 1e-7) {
  budget.validate();
  std::vector<double> rates(budget.n_spins, 0.0);
  for (const auto& e : budget.entries) {
    const int n = static_cast<int>(e.qubits.size());
    const double t = e.t_gate.value_or(default_t_gate);
    const double g = decay_rate_from_error(e.epsilon, n, t) * t / budget.tau;
    for (int q : e.qubits) {
      const int spin = physical_to_logical.empty() ? q : physical_to_logical.at(q);
      require(spin >= 0 && spin < budget.n_spins, "budget qubit out of range");
      rates[spin] += g;
    }
  }
  return rates;
}

/// Depolarizing Lindblad model equivalent to a per-step budget. A Bloch decay rate g maps to
/// Pauli rates g/4.
inline LindbladModel model_from_budget(const HamiltonianTerms& terms, const ErrorBudget& budget,
                                       const std::vector<int>& physical_to_logical = {}) {
  require(terms.n_spins == budget.n_spins, "budget and Hamiltonian describe different spin counts");
  auto rates = budget_qubit_rates(budget, physical_to_logical);
  for (double& r : rates) r /= 4.0;
  return depolarizing_model(dense_hamiltonian(terms, terms.n_spins), terms.n_spins, rates);
}

/// e^{-4 Gamma t} cos(2 eps t): the normalized <sigma^z(t) sigma^z> of H = eps sigma^x under
/// depolarizing rate Gamma.
inline double single_spin_correlation(double epsilon, double gamma_dep, double t) {
  return std::exp(-4.0 * gamma_dep * t) * std::cos(2.0 * epsilon * t);
}

// Rate-matrix files:
//
//   units s^-1
//   ops iX Xi iZ            (optional; otherwise operators are taken in order of appearance)
//   gamma iX iX 0.25        (row label, column label, real part, optional imaginary part)
//   gamma iXiX 0.25         (compact: both labels concatenated)
//
// Character k of a label acts on qubit k. Missing mirror entries are filled by Hermiticity.

struct GammaMatrixFile {
  std::vector<std::string> labels;
  DenseOperator gamma;

  std::vector<DenseOperator> operators() const {
    std::vector<DenseOperator> ops;
    for (const auto& l : labels) ops.push_back(PauliString(l).matrix());
    return ops;
  }

  LindbladModel model(const DenseOperator& hamiltonian) const {
    return LindbladModel(hamiltonian, operators(), gamma, labels);
  }
};

inline GammaMatrixFile parse_gamma_matrix(std::istream& in) {
  std::vector<std::string> labels;
  std::map<std::pair<std::string, std::string>, Complex> entries;
  bool have_units = false;
  int line_no = 0;
  auto index_of = [&](const std::string& label) {
    PauliString validated(label);
    auto it = std::find(labels.begin(), labels.end(), validated.label());
    if (it != labels.end()) return static_cast<std::size_t>(it - labels.begin());
    require(labels.empty() || labels.front().size() == validated.label().size(),
            "all Pauli labels must have the same length");
    labels.push_back(validated.label());
    return labels.size() - 1;
  };
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string where = "gamma line " + std::to_string(line_no);
    auto tokens = detail::split_ws(detail::strip_comment(raw));
    if (tokens.empty()) continue;
    if (tokens[0] == "units") {
      require(tokens.size() == 2 && (tokens[1] == "s^-1" || tokens[1] == "1/s"),
              "rates must be given in s^-1 (" + where + ")");
      have_units = true;
    } else if (tokens[0] == "ops") {
      for (std::size_t k = 1; k < tokens.size(); ++k) index_of(tokens[k]);
    } else if (tokens[0] == "gamma") {
      std::string row, col;
      std::size_t value_at = 0;
      if (tokens.size() >= 3 && tokens[1].size() % 2 == 0 && (tokens[2].find_first_not_of("iIXYZ") != std::string::npos)) {
        const std::size_t half = tokens[1].size() / 2;
        row = tokens[1].substr(0, half);
        col = tokens[1].substr(half);
        value_at = 2;
      } else {
        require(tokens.size() >= 4, "expected 'gamma A B re [im]' at " + where);
        row = tokens[1];
        col = tokens[2];
        value_at = 3;
      }
      require(tokens.size() == value_at + 1 || tokens.size() == value_at + 2, "bad gamma entry at " + where);
      Complex value(detail::parse_double(tokens[value_at], where),
                    tokens.size() == value_at + 2 ? detail::parse_double(tokens[value_at + 1], where) : 0.0);
      const std::string r = labels[index_of(row)], c = labels[index_of(col)];
      require(!entries.count({r, c}), "duplicate gamma entry at " + where);
      entries[{r, c}] = value;
    } else {
      throw ConfigError("unknown directive '" + tokens[0] + "' at " + where);
    }
  }
  require(have_units, "rate-matrix file must declare 'units s^-1'");
  require(!labels.empty(), "rate-matrix file lists no operators");
  const auto k = static_cast<Eigen::Index>(labels.size());
  DenseOperator gamma = DenseOperator::Zero(k, k);
  for (const auto& [key, value] : entries) {
    const auto r = static_cast<Eigen::Index>(std::find(labels.begin(), labels.end(), key.first) - labels.begin());
    const auto c = static_cast<Eigen::Index>(std::find(labels.begin(), labels.end(), key.second) - labels.begin());
    gamma(r, c) = value;
    if (!entries.count({key.second, key.first})) gamma(c, r) = std::conj(value);
  }
  return {labels, gamma};
}

inline GammaMatrixFile load_gamma_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rate-matrix file " + path);
  return parse_gamma_matrix(in);
}

}  // namespace qnmr

#endif  // QNMR_LINDBLAD_HPP

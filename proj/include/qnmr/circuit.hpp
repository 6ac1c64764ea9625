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

// Native-gate circuits for Trotter steps.
//
// Circuits act in the Hadamard-conjugated frame W = H^{(x)N}: the field axis x becomes z, so
// every onsite term is a virtual Rz, while S_i . S_j is invariant under W. Gate qubit indices
// are physical; `layout_in`/`layout_out` map logical spin q to its physical qubit.

#ifndef QNMR_CIRCUIT_HPP
#define QNMR_CIRCUIT_HPP

#include "qnmr/pauli.hpp"
#include "qnmr/spin_system.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qnmr {

enum class GateKind { kCnot, kX, kSqrtX, kRz, kSwap };

inline constexpr std::array<GateKind, 5> kAllGateKinds = {GateKind::kCnot, GateKind::kX, GateKind::kSqrtX,
                                                          GateKind::kRz, GateKind::kSwap};

inline std::string gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::kCnot: return "CNOT";
    case GateKind::kX: return "X";
    case GateKind::kSqrtX: return "SX";
    case GateKind::kRz: return "RZ";
    case GateKind::kSwap: return "SWAP";
  }
  return "?";
}

inline std::optional<GateKind> parse_gate_kind(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
  if (name == "CNOT" || name == "CX") return GateKind::kCnot;
  if (name == "X") return GateKind::kX;
  if (name == "SX" || name == "SQRTX") return GateKind::kSqrtX;
  if (name == "RZ") return GateKind::kRz;
  if (name == "SWAP") return GateKind::kSwap;
  return std::nullopt;
}

inline int gate_arity(GateKind kind) { return kind == GateKind::kCnot || kind == GateKind::kSwap ? 2 : 1; }

/// Only Rz is virtual: a frame change in software, no pulse.
inline bool is_virtual(GateKind kind) { return kind == GateKind::kRz; }

struct Gate {
  GateKind kind = GateKind::kX;
  std::array<int, 2> qubits{0, 0};  // CNOT: control, target
  double angle = 0.0;               // RZ only
  std::string origin;

  int arity() const { return gate_arity(kind); }
  std::span<const int> targets() const { return {qubits.data(), static_cast<std::size_t>(arity())}; }

  static Gate cnot(int control, int target, std::string origin = {}) {
    return {GateKind::kCnot, {control, target}, 0.0, std::move(origin)};
  }
  static Gate x(int q, std::string origin = {}) { return {GateKind::kX, {q, 0}, 0.0, std::move(origin)}; }
  static Gate sx(int q, std::string origin = {}) { return {GateKind::kSqrtX, {q, 0}, 0.0, std::move(origin)}; }
  static Gate rz(int q, double angle, std::string origin = {}) {
    return {GateKind::kRz, {q, 0}, angle, std::move(origin)};
  }
  static Gate swap(int a, int b, std::string origin = {}) {
    return {GateKind::kSwap, {a, b}, 0.0, std::move(origin)};
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Local matrix; qubits()[0] is the least significant local bit.
inline DenseOperator gate_matrix(const Gate& gate) {
  const Complex i(0, 1);
  switch (gate.kind) {
    case GateKind::kX: return DenseOperator(pauli_matrix(Axis::kX));
    case GateKind::kSqrtX: {
      DenseOperator m(2, 2);
      m << 0.5 * (1.0 + i), 0.5 * (1.0 - i), 0.5 * (1.0 - i), 0.5 * (1.0 + i);
      return m;
    }
    case GateKind::kRz: {
      DenseOperator m = DenseOperator::Zero(2, 2);
      m(0, 0) = std::exp(-i * (gate.angle / 2));
      m(1, 1) = std::exp(i * (gate.angle / 2));
      return m;
    }
    case GateKind::kCnot: {
      DenseOperator m = DenseOperator::Zero(4, 4);
      m(0, 0) = m(2, 2) = 1;
      m(3, 1) = m(1, 3) = 1;
      return m;
    }
    case GateKind::kSwap: {
      DenseOperator m = DenseOperator::Zero(4, 4);
      m(0, 0) = m(3, 3) = 1;
      m(1, 2) = m(2, 1) = 1;
      return m;
    }
  }
  return {};
}

/// m <- G m for a local operator G on `qubits`; O(k 2^k dim) per column block.
inline void apply_local_left(DenseOperator& m, const DenseOperator& local, std::span<const int> qubits) {
  const int k = static_cast<int>(qubits.size());
  const std::size_t block = std::size_t{1} << k;
  const auto dim = static_cast<std::size_t>(m.rows());
  std::size_t mask = 0;
  for (int q : qubits) mask |= std::size_t{1} << q;
  std::vector<std::size_t> idx(block);
  Eigen::VectorXcd in(static_cast<Eigen::Index>(block));
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t l = 0; l < block; ++l) {
      std::size_t row = base;
      for (int b = 0; b < k; ++b) row |= ((l >> b) & 1u) << qubits[b];
      idx[l] = row;
    }
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      for (std::size_t l = 0; l < block; ++l) in(static_cast<Eigen::Index>(l)) = m(idx[l], col);
      for (std::size_t l = 0; l < block; ++l) {
        Complex acc{};
        for (std::size_t r = 0; r < block; ++r) acc += local(l, r) * in(static_cast<Eigen::Index>(r));
        m(idx[l], col) = acc;
      }
    }
  }
}

/// m <- m G^dag.
inline void apply_local_right_adjoint(DenseOperator& m, const DenseOperator& local, std::span<const int> qubits) {
  m.adjointInPlace();
  apply_local_left(m, local, qubits);
  m.adjointInPlace();
}

struct Circuit {
  int width = 0;
  std::vector<Gate> gates;
  std::vector<int> layout_in;   // logical -> physical before the first gate
  std::vector<int> layout_out;  // logical -> physical after the last gate
  bool hadamard_frame = false;  // circuit implements W U W rather than U

  static Circuit empty(int width) {
    Circuit c;
    c.width = width;
    c.layout_in.resize(width);
    for (int q = 0; q < width; ++q) c.layout_in[q] = q;
    c.layout_out = c.layout_in;
    return c;
  }

  bool layout_restored() const { return layout_in == layout_out; }

  void validate() const {
    require(width >= 1, "circuit width must be positive");
    auto check_perm = [&](const std::vector<int>& perm, const char* what) {
      require(static_cast<int>(perm.size()) == width, std::string(what) + " has wrong length");
      std::vector<bool> seen(width, false);
      for (int p : perm) {
        require(p >= 0 && p < width && !seen[p], std::string(what) + " is not a permutation");
        seen[p] = true;
      }
    };
    check_perm(layout_in, "layout_in");
    check_perm(layout_out, "layout_out");
    for (const auto& g : gates) {
      for (int q : g.targets()) require(q >= 0 && q < width, "gate qubit out of range");
      if (g.arity() == 2) require(g.qubits[0] != g.qubits[1], "two-qubit gate on a single qubit");
      require(std::isfinite(g.angle), "gate angle must be finite");
    }
  }
};

// ---------------------------------------------------------------------------------------------
// Heisenberg block

namespace detail {

/// Ry(phi) = Rz(pi) SX Rz(phi + pi) SX up to phase, listed in time order.
inline void append_ry(std::vector<Gate>& out, int q, double phi, const std::string& origin) {
  out.push_back(Gate::sx(q, origin));
  out.push_back(Gate::rz(q, phi + kPi, origin));
  out.push_back(Gate::sx(q, origin));
  out.push_back(Gate::rz(q, kPi, origin));
}

inline void append_rz(std::vector<Gate>& out, int q, double angle, const std::string& origin) {
  if (angle != 0.0) out.push_back(Gate::rz(q, angle, origin));
}

}  // namespace detail

/// exp(-i theta (XX + YY + ZZ)/4) on (q0, q1), up to global phase: 3 CNOT, 4 SX, virtual Rz.
inline std::vector<Gate> decompose_heisenberg(double theta, int q0 = 0, int q1 = 1, const std::string& origin = {}) {
  require(std::isfinite(theta), "Heisenberg angle must be finite");
  require(q0 != q1, "Heisenberg block needs two distinct qubits");
  // exp(i(a XX + b YY + c ZZ)) with a = b = c.
  const double a = -theta / 4, b = a, c = a;
  std::vector<Gate> g;
  detail::append_rz(g, q1, -kPi / 2, origin);
  g.push_back(Gate::cnot(q1, q0, origin));
  detail::append_rz(g, q0, kPi / 2 - 2 * c, origin);
  detail::append_ry(g, q1, 2 * a - kPi / 2, origin);
  g.push_back(Gate::cnot(q0, q1, origin));
  detail::append_ry(g, q1, kPi / 2 - 2 * b, origin);
  g.push_back(Gate::cnot(q1, q0, origin));
  detail::append_rz(g, q0, kPi / 2, origin);
  return g;
}

// ---------------------------------------------------------------------------------------------
// Trotter steps

enum class Topology { kAllToAll, kLinearChain };

inline std::string topology_name(Topology t) { return t == Topology::kAllToAll ? "all-to-all" : "linear"; }

inline Topology parse_topology(const std::string& name) {
  if (name == "all-to-all" || name == "all") return Topology::kAllToAll;
  if (name == "linear" || name == "chain" || name == "linear-chain") return Topology::kLinearChain;
  throw ConfigError("unknown topology '" + name + "'");
}

namespace detail {

inline int chain_cost(const std::vector<PairTerm>& pairs, const std::vector<int>& l2p) {
  int cost = 0;
  for (const auto& p : pairs) cost += std::abs(l2p[p.i] - l2p[p.j]) - 1;
  return cost;
}

/// Lexicographically first permutation minimizing the total excess chain distance.
inline std::vector<int> chain_layout(int n, const std::vector<PairTerm>& pairs) {
  std::vector<int> perm(n);
  for (int q = 0; q < n; ++q) perm[q] = q;
  if (n > 8) return perm;
  std::vector<int> best = perm;
  int best_cost = chain_cost(pairs, perm);
  while (best_cost > 0 && std::next_permutation(perm.begin(), perm.end())) {
    int cost = chain_cost(pairs, perm);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  }
  return best;
}

struct StepOp {
  enum Kind { kOnsite, kBlock, kSwap } kind;
  double factor = 0.0;  // onsite: fraction of tau
  int lo = 0, hi = 0;   // physical qubits
  double theta = 0.0;
  bool fused = false;   // block also swaps its qubits
  std::string origin;
};

class ChainRouter {
 public:
  ChainRouter(std::vector<int> layout, bool chain) : l2p_(std::move(layout)), chain_(chain) {
    p2l_.resize(l2p_.size());
    for (std::size_t q = 0; q < l2p_.size(); ++q) p2l_[l2p_[q]] = static_cast<int>(q);
  }

  std::vector<StepOp>& ops() { return ops_; }
  const std::vector<int>& layout() const { return l2p_; }

  void onsite(double factor) { ops_.push_back({StepOp::kOnsite, factor, 0, 0, 0.0, false, {}}); }

  void pair(const PairTerm& p, double theta) {
    const std::string origin = "J:" + std::to_string(p.i) + "-" + std::to_string(p.j);
    while (chain_ && distance(p.i, p.j) > 1) {
      const int before = distance(p.i, p.j);
      if (StepOp* last = fusable_block()) {
        swap_physical(last->lo);
        if (distance(p.i, p.j) < before) {
          last->fused = true;
          continue;
        }
        swap_physical(last->lo);  // no gain, undo
      }
      // Move p.j one site toward p.i.
      const int pj = l2p_[p.j];
      const int lo = l2p_[p.i] < pj ? pj - 1 : pj;
      swap_physical(lo);
      ops_.push_back({StepOp::kSwap, 0.0, lo, lo + 1, 0.0, false, "swap"});
    }
    const int a = l2p_[p.i], b = l2p_[p.j];
    ops_.push_back({StepOp::kBlock, 0.0, std::min(a, b), std::max(a, b), theta, false, origin});
  }

  /// Adjacent transpositions back to `target`, fusing into the trailing block where possible.
  void restore(const std::vector<int>& target) {
    while (l2p_ != target) {
      std::vector<int> inverted;
      for (std::size_t p = 0; p + 1 < p2l_.size(); ++p) {
        if (target[p2l_[p]] > target[p2l_[p + 1]]) inverted.push_back(static_cast<int>(p));
      }
      StepOp* last = fusable_block();
      if (last && std::find(inverted.begin(), inverted.end(), last->lo) != inverted.end()) {
        last->fused = true;
        swap_physical(last->lo);
        continue;
      }
      swap_physical(inverted.front());
      ops_.push_back({StepOp::kSwap, 0.0, inverted.front(), inverted.front() + 1, 0.0, false, "swap"});
    }
  }

 private:
  int distance(int a, int b) const { return std::abs(l2p_[a] - l2p_[b]); }

  StepOp* fusable_block() {
    if (ops_.empty() || ops_.back().kind != StepOp::kBlock || ops_.back().fused) return nullptr;
    return &ops_.back();
  }

  void swap_physical(int lo) {
    std::swap(p2l_[lo], p2l_[lo + 1]);
    l2p_[p2l_[lo]] = lo;
    l2p_[p2l_[lo + 1]] = lo + 1;
  }

  std::vector<int> l2p_;
  std::vector<int> p2l_;
  bool chain_;
  std::vector<StepOp> ops_;
};

}  // namespace detail

/// One Trotter step of duration tau.
///
/// Order 1: onsite layer, then pair blocks in lexicographic order.
/// Order 2: half onsite layer, the palindrome P_1(tau/2)..P_{m-1}(tau/2) P_m(tau) P_{m-1}(tau/2)..P_1(tau/2),
/// half onsite layer.
/// On a chain the initial layout minimizes routing, SWAPs needed for distant pairs are fused into
/// the preceding block on the same edge when possible (SWAP exp(-i theta S.S) ~ exp(-i(theta+pi) S.S)),
/// and the step ends in its initial layout.
inline Circuit trotter_step(const HamiltonianTerms& terms, double tau, int order, Topology topology) {
  terms.validate();
  require(std::isfinite(tau) && tau > 0, "Trotter step tau must be > 0");
  require(order == 1 || order == 2, "Trotter order must be 1 or 2");
  const int n = terms.n_spins;
  const bool chain = topology == Topology::kLinearChain;

  std::vector<int> layout(n);
  for (int q = 0; q < n; ++q) layout[q] = q;
  if (chain) layout = detail::chain_layout(n, terms.pairs);

  detail::ChainRouter router(layout, chain);
  const auto& pairs = terms.pairs;
  const std::size_t m = pairs.size();
  if (order == 1) {
    router.onsite(1.0);
    for (const auto& p : pairs) router.pair(p, p.coupling * tau);
  } else {
    router.onsite(0.5);
    for (std::size_t k = 0; k + 1 < m; ++k) router.pair(pairs[k], pairs[k].coupling * tau / 2);
    if (m > 0) router.pair(pairs[m - 1], pairs[m - 1].coupling * tau);
    for (std::size_t k = m - 1; m > 1 && k-- > 0;) router.pair(pairs[k], pairs[k].coupling * tau / 2);
  }
  router.restore(layout);
  if (order == 2) router.onsite(0.5);

  Circuit c = Circuit::empty(n);
  c.layout_in = layout;
  c.layout_out = router.layout();
  c.hadamard_frame = true;
  for (const auto& op : router.ops()) {
    switch (op.kind) {
      case detail::StepOp::kOnsite:
        for (const auto& t : terms.onsite) {
          detail::append_rz(c.gates, layout[t.spin], t.omega * op.factor * tau, "onsite:" + std::to_string(t.spin));
        }
        break;
      case detail::StepOp::kBlock: {
        auto block = decompose_heisenberg(op.theta + (op.fused ? kPi : 0.0), op.lo, op.hi,
                                          op.fused ? op.origin + "+swap" : op.origin);
        c.gates.insert(c.gates.end(), block.begin(), block.end());
        break;
      }
      case detail::StepOp::kSwap:
        c.gates.push_back(Gate::cnot(op.lo, op.hi, op.origin));
        c.gates.push_back(Gate::cnot(op.hi, op.lo, op.origin));
        c.gates.push_back(Gate::cnot(op.lo, op.hi, op.origin));
        break;
    }
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------------------------
// Unitaries

/// Physical basis index of the logical basis state `bits` under `l2p`.
inline std::size_t physical_index(std::size_t bits, const std::vector<int>& l2p) {
  std::size_t out = 0;
  for (std::size_t q = 0; q < l2p.size(); ++q) out |= ((bits >> q) & 1u) << l2p[q];
  return out;
}

/// Gate product in the physical basis.
inline DenseOperator physical_unitary(const Circuit& circuit) {
  check_dense_size(circuit.width);
  const std::size_t dim = dimension_of(circuit.width);
  DenseOperator u = DenseOperator::Identity(dim, dim);
  for (const auto& g : circuit.gates) apply_local_left(u, gate_matrix(g), g.targets());
  return u;
}

/// Gate product expressed in the logical basis: P_out^dag U P_in.
inline DenseOperator circuit_unitary(const Circuit& circuit) {
  circuit.validate();
  const DenseOperator phys = physical_unitary(circuit);
  const std::size_t dim = dimension_of(circuit.width);
  DenseOperator u(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t pr = physical_index(r, circuit.layout_out);
    for (std::size_t c = 0; c < dim; ++c) u(r, c) = phys(pr, physical_index(c, circuit.layout_in));
  }
  return u;
}

/// H^{(x)n}; real, symmetric, involutive.
inline DenseOperator hadamard_frame_operator(int n) {
  check_dense_size(n);
  DenseOperator h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  DenseOperator w = DenseOperator::Identity(dimension_of(n), dimension_of(n));
  for (int q = 0; q < n; ++q) {
    const int qubit[1] = {q};
    apply_local_left(w, h, qubit);
  }
  return w;
}

/// The circuit's action on the spin system, undoing the computational frame if present.
inline DenseOperator spin_frame_unitary(const Circuit& circuit) {
  DenseOperator u = circuit_unitary(circuit);
  if (!circuit.hadamard_frame) return u;
  const DenseOperator w = hadamard_frame_operator(circuit.width);
  return w * u * w;
}

/// Repeats a step `n_steps` times.
inline Circuit repeat(const Circuit& step, int n_steps) {
  require(n_steps >= 0, "repeat count must be >= 0");
  require(step.layout_restored() || n_steps <= 1, "only layout-restoring steps can be repeated");
  Circuit c = step;
  c.gates.clear();
  for (int k = 0; k < n_steps; ++k) c.gates.insert(c.gates.end(), step.gates.begin(), step.gates.end());
  if (n_steps == 0) c.layout_out = c.layout_in;
  return c;
}

// ---------------------------------------------------------------------------------------------
// Census

struct GateCensus {
  std::map<GateKind, int> by_kind;     // SWAP contributes 3 CNOT and is not listed itself
  std::map<std::string, int> by_origin;

  int count(GateKind kind) const {
    auto it = by_kind.find(kind);
    return it == by_kind.end() ? 0 : it->second;
  }
  int cnot() const { return count(GateKind::kCnot); }
  int total() const {
    int t = 0;
    for (const auto& [k, v] : by_kind) t += v;
    return t;
  }
};

inline GateCensus gate_census(const Circuit& circuit) {
  GateCensus census;
  for (const auto& g : circuit.gates) {
    const int weight = g.kind == GateKind::kSwap ? 3 : 1;
    const GateKind kind = g.kind == GateKind::kSwap ? GateKind::kCnot : g.kind;
    census.by_kind[kind] += weight;
    census.by_origin[g.origin.empty() ? std::string("-") : g.origin] += weight;
  }
  return census;
}

// ---------------------------------------------------------------------------------------------
// Text format
//
//   # width 3
//   # layout 1 0 2
//   # layout_out 1 0 2
//   # frame hadamard
//   RZ 0 0.0123  # onsite:0
//   CNOT 1 0     # J:0-1

inline void dump_circuit(std::ostream& out, const Circuit& circuit) {
  out << "# width " << circuit.width << "\n# layout";
  for (int p : circuit.layout_in) out << ' ' << p;
  out << "\n# layout_out";
  for (int p : circuit.layout_out) out << ' ' << p;
  out << "\n# frame " << (circuit.hadamard_frame ? "hadamard" : "identity") << '\n';
  for (const auto& g : circuit.gates) {
    out << gate_name(g.kind);
    for (int q : g.targets()) out << ' ' << q;
    if (g.kind == GateKind::kRz) out << ' ' << format_number(g.angle);
    if (!g.origin.empty()) out << "  # " << g.origin;
    out << '\n';
  }
}

inline Circuit parse_circuit(std::istream& in) {
  Circuit c;
  bool have_out = false;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string where = "circuit line " + std::to_string(line_no);
    auto hash = raw.find('#');
    std::string body = raw.substr(0, hash);
    std::string comment = hash == std::string::npos ? std::string() : raw.substr(hash + 1);
    std::istringstream tokens(body);
    std::string head;
    if (!(tokens >> head)) {
      std::istringstream d(comment);
      std::string key;
      d >> key;
      if (key == "width") {
        require(static_cast<bool>(d >> c.width), "bad width at " + where);
      } else if (key == "layout" || key == "layout_out") {
        std::vector<int>& target = key == "layout" ? c.layout_in : c.layout_out;
        target.clear();
        for (int p; d >> p;) target.push_back(p);
        have_out = have_out || key == "layout_out";
      } else if (key == "frame") {
        std::string f;
        d >> f;
        c.hadamard_frame = f == "hadamard";
      }
      continue;
    }
    auto kind = parse_gate_kind(head);
    require(kind.has_value(), "unknown gate '" + head + "' at " + where);
    Gate g;
    g.kind = *kind;
    for (int k = 0; k < g.arity(); ++k) {
      require(static_cast<bool>(tokens >> g.qubits[k]), "missing qubit index at " + where);
    }
    if (g.kind == GateKind::kRz) {
      std::string angle;
      require(static_cast<bool>(tokens >> angle), "missing RZ angle at " + where);
      g.angle = detail::parse_double(angle, where);
    }
    std::string extra;
    require(!(tokens >> extra), "trailing token '" + extra + "' at " + where);
    std::istringstream o(comment);
    o >> g.origin;
    c.gates.push_back(std::move(g));
  }
  if (c.width == 0) {
    for (const auto& g : c.gates) {
      for (int q : g.targets()) c.width = std::max(c.width, q + 1);
    }
  }
  if (c.layout_in.empty()) {
    c.layout_in.resize(c.width);
    for (int q = 0; q < c.width; ++q) c.layout_in[q] = q;
  }
  if (!have_out) c.layout_out = c.layout_in;
  c.validate();
  return c;
}

}  // namespace qnmr

#endif  // QNMR_CIRCUIT_HPP

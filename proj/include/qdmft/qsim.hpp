// Copyright 2026 The qdmft Authors
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

#pragma once

// Dense statevector simulator for registers of up to five qubits.
//
// Basis index bit k encodes qubit k (qubit 0 is the least significant bit).
// Qubit state |0> is the +1 eigenstate of sigma^z, which under the
// Jordan-Wigner encoding used elsewhere in the library is an empty mode.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/errors.hpp"

namespace qdmft {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 5;
inline constexpr Complex kI{0.0, 1.0};

enum class PauliAxis : std::uint8_t { x, y, z };

enum class GateKind : std::uint8_t {
  rot_x,
  rot_y,
  rot_z,
  hadamard,
  xy,
  zz,
  cz_phi,
  swap,
  controlled_pauli,
};

/// A gate specification. Rotations follow R_A(theta) = exp(-i theta/2 A);
/// XY(theta) = exp[-i theta/2 (XX + YY)]; ZZ(theta) = exp[-i theta/2 ZZ];
/// CZPhi(phi) = diag(1, 1, 1, e^{i phi}).
///
/// For two-qubit gates the local basis index is b0 + 2*b1 where b0 is the
/// bit of targets[0]. A controlled Pauli uses targets[0] as the control and
/// applies sigma^axis to targets[1] when the control bit equals
/// control_value.
struct Gate {
  GateKind kind = GateKind::hadamard;
  std::array<int, 2> targets{-1, -1};
  double angle = 0.0;
  PauliAxis axis = PauliAxis::x;
  int control_value = 1;

  static Gate rx(int q, double theta) { return {GateKind::rot_x, {q, -1}, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::rot_y, {q, -1}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::rot_z, {q, -1}, theta}; }
  static Gate h(int q) { return {GateKind::hadamard, {q, -1}}; }
  static Gate xy(int a, int b, double theta) { return {GateKind::xy, {a, b}, theta}; }
  static Gate zz(int a, int b, double theta) { return {GateKind::zz, {a, b}, theta}; }
  static Gate cz_phi(int a, int b, double phi) { return {GateKind::cz_phi, {a, b}, phi}; }
  static Gate swap(int a, int b) { return {GateKind::swap, {a, b}}; }
  static Gate controlled_pauli(int control, int target, PauliAxis axis,
                               int control_value) {
    return {GateKind::controlled_pauli, {control, target}, 0.0, axis, control_value};
  }

  int arity() const {
    switch (kind) {
      case GateKind::rot_x:
      case GateKind::rot_y:
      case GateKind::rot_z:
      case GateKind::hadamard:
        return 1;
      default:
        return 2;
    }
  }

  bool has_angle() const {
    switch (kind) {
      case GateKind::hadamard:
      case GateKind::swap:
      case GateKind::controlled_pauli:
        return false;
      default:
        return true;
    }
  }

  bool is_single_qubit_rotation() const {
    return kind == GateKind::rot_x || kind == GateKind::rot_y || kind == GateKind::rot_z;
  }

  std::span<const int> active_targets() const {
    return {targets.data(), static_cast<std::size_t>(arity())};
  }

  /// Throws DomainError unless the targets fit an n-qubit register.
  void validate(int n_qubits) const {
    for (int q : active_targets()) {
      if (q < 0 || q >= n_qubits) {
        throw DomainError("gate target " + std::to_string(q) + " outside register of " +
                          std::to_string(n_qubits) + " qubits");
      }
    }
    if (arity() == 2 && targets[0] == targets[1]) {
      throw DomainError("two-qubit gate needs distinct targets");
    }
    if (kind == GateKind::controlled_pauli && control_value != 0 && control_value != 1) {
      throw DomainError("control value must be 0 or 1");
    }
    if (has_angle() && !std::isfinite(angle)) {
      throw DomainError("gate angle must be finite");
    }
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

inline Eigen::Matrix2cd pauli_matrix(PauliAxis axis) {
  Eigen::Matrix2cd m;
  switch (axis) {
    case PauliAxis::x:
      m << 0, 1, 1, 0;
      break;
    case PauliAxis::y:
      m << 0, -kI, kI, 0;
      break;
    case PauliAxis::z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

/// Dense 2x2 or 4x4 unitary of a gate in its local basis.
inline DenseMatrix gate_matrix(const Gate& g) {
  const double t = g.angle;
  const double c = std::cos(t / 2.0);
  const double s = std::sin(t / 2.0);
  switch (g.kind) {
    case GateKind::rot_x: {
      Eigen::Matrix2cd m;
      m << c, -kI * s, -kI * s, c;
      return m;
    }
    case GateKind::rot_y: {
      Eigen::Matrix2cd m;
      m << c, -s, s, c;
      return m;
    }
    case GateKind::rot_z: {
      Eigen::Matrix2cd m;
      m << std::exp(-kI * (t / 2.0)), 0, 0, std::exp(kI * (t / 2.0));
      return m;
    }
    case GateKind::hadamard: {
      Eigen::Matrix2cd m;
      m << 1, 1, 1, -1;
      return m / std::numbers::sqrt2;
    }
    case GateKind::xy: {
      // XX + YY is 2 * (|01><10| + |10><01|) and vanishes on |00>, |11>.
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = 1;
      m(3, 3) = 1;
      m(1, 1) = m(2, 2) = std::cos(t);
      m(1, 2) = m(2, 1) = -kI * std::sin(t);
      return m;
    }
    case GateKind::zz: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      const Complex even = std::exp(-kI * (t / 2.0));
      const Complex odd = std::exp(kI * (t / 2.0));
      m(0, 0) = even;
      m(1, 1) = odd;
      m(2, 2) = odd;
      m(3, 3) = even;
      return m;
    }
    case GateKind::cz_phi: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
      m(3, 3) = std::exp(kI * t);
      return m;
    }
    case GateKind::swap: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = 1;
      m(1, 2) = 1;
      m(2, 1) = 1;
      m(3, 3) = 1;
      return m;
    }
    case GateKind::controlled_pauli: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      const Eigen::Matrix2cd p = pauli_matrix(g.axis);
      // Local index = control + 2 * target.
      for (int ctrl = 0; ctrl < 2; ++ctrl) {
        for (int out = 0; out < 2; ++out) {
          for (int in = 0; in < 2; ++in) {
            const Complex v = ctrl == g.control_value ? p(out, in) : Complex(out == in ? 1 : 0);
            m(ctrl + 2 * out, ctrl + 2 * in) = v;
          }
        }
      }
      return m;
    }
  }
  throw InvariantError("unknown gate kind");
}

class StateVector {
 public:
  StateVector() = default;

  /// Wraps amplitudes; throws DomainError on bad length or norm.
  StateVector(int n_qubits, Eigen::VectorXcd amplitudes)
      : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits_ < 1 || n_qubits_ > kMaxQubits) {
      throw DomainError("register size must be in [1, 5]");
    }
    if (amps_.size() != (Eigen::Index{1} << n_qubits_)) {
      throw DomainError("amplitude count must be 2^n_qubits");
    }
    if (std::abs(amps_.norm() - 1.0) > 1e-10) {
      throw DomainError("state vector is not normalized");
    }
  }

  /// Normalizes v first; throws DomainError for the zero vector.
  static StateVector normalized(int n_qubits, Eigen::VectorXcd v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw DomainError("cannot normalize a zero vector");
    v /= n;
    return {n_qubits, std::move(v)};
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
  double norm() const { return amps_.norm(); }

  // Gate kernels. Callers validate targets first.
  void apply_local(const Eigen::Matrix2cd& m, int q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i & bit) continue;
      const Complex a0 = amps_[i];
      const Complex a1 = amps_[i | bit];
      amps_[i] = m(0, 0) * a0 + m(0, 1) * a1;
      amps_[i | bit] = m(1, 0) * a0 + m(1, 1) * a1;
    }
  }

  void apply_local(const Eigen::Matrix4cd& m, int q0, int q1) {
    const std::size_t b0 = std::size_t{1} << q0;
    const std::size_t b1 = std::size_t{1} << q1;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i & (b0 | b1)) continue;
      const std::array<std::size_t, 4> idx{i, i | b0, i | b1, i | b0 | b1};
      std::array<Complex, 4> in;
      for (int k = 0; k < 4; ++k) in[k] = amps_[idx[k]];
      for (int r = 0; r < 4; ++r) {
        Complex acc = 0;
        for (int k = 0; k < 4; ++k) acc += m(r, k) * in[k];
        amps_[idx[r]] = acc;
      }
    }
  }

  /// Applies a dense 2^k x 2^k unitary to the listed qubits (qubits[0] is the
  /// least significant bit of the local index).
  void apply_local(const DenseMatrix& m, std::span<const int> qubits) {
    const std::size_t k = qubits.size();
    const std::size_t local_dim = std::size_t{1} << k;
    if (static_cast<std::size_t>(m.rows()) != local_dim ||
        static_cast<std::size_t>(m.cols()) != local_dim) {
      throw DomainError("unitary dimension does not match qubit list");
    }
    std::size_t mask = 0;
    std::vector<std::size_t> offset(local_dim, 0);
    for (std::size_t j = 0; j < k; ++j) {
      if (qubits[j] < 0 || qubits[j] >= n_qubits_) throw DomainError("qubit out of range");
      const std::size_t bit = std::size_t{1} << qubits[j];
      if (mask & bit) throw DomainError("repeated qubit in unitary target list");
      mask |= bit;
    }
    for (std::size_t l = 0; l < local_dim; ++l) {
      for (std::size_t j = 0; j < k; ++j) {
        if (l & (std::size_t{1} << j)) offset[l] |= std::size_t{1} << qubits[j];
      }
    }
    Eigen::VectorXcd in(static_cast<Eigen::Index>(local_dim));
    for (std::size_t base = 0; base < dim(); ++base) {
      if (base & mask) continue;
      for (std::size_t l = 0; l < local_dim; ++l) in[l] = amps_[base | offset[l]];
      const Eigen::VectorXcd out = m * in;
      for (std::size_t l = 0; l < local_dim; ++l) amps_[base | offset[l]] = out[l];
    }
  }

 private:
  int n_qubits_ = 0;
  Eigen::VectorXcd amps_;
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
      throw DomainError("register size must be in [1, 5]");
    }
  }

  Circuit& append(const Gate& g) {
    g.validate(n_qubits_);
    gates_.push_back(g);
    return *this;
  }

  Circuit& append(const Circuit& other) {
    if (other.n_qubits_ > n_qubits_) throw DomainError("appended circuit is wider");
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
    return *this;
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_ = 1;
  std::vector<Gate> gates_;
};

inline StateVector init_basis_state(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DomainError("register size must be in [1, 5]");
  }
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  if (index >= dim) throw DomainError("basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return {n_qubits, std::move(v)};
}

inline void apply_gate_in_place(StateVector& state, const Gate& g) {
  g.validate(state.n_qubits());
  const DenseMatrix m = gate_matrix(g);
  if (g.arity() == 1) {
    state.apply_local(Eigen::Matrix2cd(m), g.targets[0]);
  } else {
    state.apply_local(Eigen::Matrix4cd(m), g.targets[0], g.targets[1]);
  }
}

inline StateVector apply_gate(StateVector state, const Gate& g) {
  apply_gate_in_place(state, g);
  return state;
}

inline void apply_circuit_in_place(StateVector& state, const Circuit& circuit) {
  if (circuit.n_qubits() != state.n_qubits()) {
    throw DomainError("circuit and state have different qubit counts");
  }
  for (const Gate& g : circuit.gates()) apply_gate_in_place(state, g);
}

inline StateVector apply_circuit(StateVector state, const Circuit& circuit) {
  apply_circuit_in_place(state, circuit);
  return state;
}

inline double expectation_pauli(const StateVector& state, PauliAxis axis, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) throw DomainError("qubit out of range");
  const std::size_t bit = std::size_t{1} << qubit;
  const auto& a = state.amplitudes();
  double acc = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & bit) continue;
    const Complex a0 = a[i];
    const Complex a1 = a[i | bit];
    switch (axis) {
      case PauliAxis::z:
        acc += std::norm(a0) - std::norm(a1);
        break;
      case PauliAxis::x:
        acc += 2.0 * (std::conj(a0) * a1).real();
        break;
      case PauliAxis::y:
        // <a| Y |a> = -i conj(a0) a1 + i conj(a1) a0 = 2 Im(conj(a0) a1)
        acc += 2.0 * (std::conj(a0) * a1).imag();
        break;
    }
  }
  return acc;
}

inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw DomainError("state dimensions differ");
  return a.amplitudes().dot(b.amplitudes());  // Eigen conjugates the left operand
}

/// Dense unitary of a circuit, built column by column from basis states.
inline DenseMatrix circuit_unitary(const Circuit& circuit) {
  const Eigen::Index dim = Eigen::Index{1} << circuit.n_qubits();
  DenseMatrix u(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    StateVector col = init_basis_state(circuit.n_qubits(), static_cast<std::uint64_t>(j));
    apply_circuit_in_place(col, circuit);
    u.col(j) = col.amplitudes();
  }
  return u;
}

}  // namespace qdmft

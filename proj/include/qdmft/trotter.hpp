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

// Trotterized time evolution of the two-site SIAM. Two backends:
//   xy  - native XY gates for the hopping, a direct ZZ gate for the
//         interaction, Z rotations for the one-body terms;
//   cz  - hopping through basis-rotated ZZ blocks, every ZZ lowered to a
//         pair of controlled-phase gates, interaction routed through SWAPs.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "qdmft/errors.hpp"
#include "qdmft/qsim.hpp"
#include "qdmft/siam.hpp"

namespace qdmft {

enum class TrotterMethod { xy, cz };
enum class Parity { odd, even };

struct TrotterPlan {
  TrotterMethod method = TrotterMethod::xy;
  int n_steps = 1;
  double tau = 0.0;
  SiamParams params;
  bool optimize_pairs = false;  // cz only

  double dt() const { return tau / n_steps; }

  void validate() const {
    if (n_steps < 1) throw DomainError("n_steps must be >= 1");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and >= 0");
    params.validate();
  }
};

struct GateCount {
  int zz_gates = 0;
  int swap_gates = 0;
  int single_qubit_rotations = 0;
  int xy_gates = 0;
  int czphi_gates = 0;

  friend bool operator==(const GateCount&, const GateCount&) = default;
};

namespace detail {

inline void check_dt(double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw DomainError("dt must be finite and >= 0");
}

// Rotation angles of the diagonal one-body factors.
inline double c_angle(const SiamParams& p, double dt) { return (p.mu - p.u / 2.0) * dt; }
inline double d_angle(const SiamParams& p, double dt) { return -p.epsilon_c * dt; }
inline double b_angle(const SiamParams& p, double dt) { return p.u * dt / 2.0; }

inline void append_diagonal(Circuit& c, const SiamParams& p, double dt) {
  c.append(Gate::rz(0, c_angle(p, dt))).append(Gate::rz(2, c_angle(p, dt)));
  c.append(Gate::rz(1, d_angle(p, dt))).append(Gate::rz(3, d_angle(p, dt)));
}

// Interaction between qubits 0 and 2 moved onto the neighbours (0, 1).
inline void append_routed_interaction(Circuit& c, const SiamParams& p, double dt) {
  c.append(Gate::swap(1, 2)).append(Gate::zz(0, 1, b_angle(p, dt))).append(Gate::swap(1, 2));
}

inline void append_all(Circuit& c, GateKind kind, double angle) {
  for (int q = 0; q < kSystemQubits; ++q) c.append(Gate{kind, {q, -1}, angle});
}

inline void append_hopping_zz(Circuit& c, const SiamParams& p, double dt) {
  c.append(Gate::zz(0, 1, p.v * dt)).append(Gate::zz(2, 3, p.v * dt));
}

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Rx(-pi/2) ZZ Rx(pi/2) = exp(-i theta/2 YY) on each pair.
inline void append_yy_block(Circuit& c, const SiamParams& p, double dt) {
  append_all(c, GateKind::rot_x, kHalfPi);
  append_hopping_zz(c, p, dt);
  append_all(c, GateKind::rot_x, -kHalfPi);
}

// Ry(pi/2) ZZ Ry(-pi/2) = exp(-i theta/2 XX); the outer rotations are
// optional so that adjacent steps can cancel them.
inline void append_xx_block(Circuit& c, const SiamParams& p, double dt, bool open, bool close) {
  if (open) append_all(c, GateKind::rot_y, -kHalfPi);
  append_hopping_zz(c, p, dt);
  if (close) append_all(c, GateKind::rot_y, kHalfPi);
}

}  // namespace detail

/// One first-order factor exp(-i H_hop dt) exp(-i H_int dt) exp(-i H_C dt)
/// exp(-i H_D dt) with XY gates. Factors with a vanishing coefficient are
/// omitted.
inline Circuit build_xy_step(const SiamParams& p, double dt) {
  detail::check_dt(dt);
  Circuit c(kSystemQubits);
  if (p.mu - p.u / 2.0 != 0.0) {
    c.append(Gate::rz(0, detail::c_angle(p, dt))).append(Gate::rz(2, detail::c_angle(p, dt)));
  }
  if (p.epsilon_c != 0.0) {
    c.append(Gate::rz(1, detail::d_angle(p, dt))).append(Gate::rz(3, detail::d_angle(p, dt)));
  }
  if (p.u != 0.0) c.append(Gate::zz(0, 2, detail::b_angle(p, dt)));
  c.append(Gate::xy(0, 1, p.v * dt)).append(Gate::xy(2, 3, p.v * dt));
  return c;
}

/// One CZ-backend step with ZZ gates not yet lowered. Unoptimized steps run
/// diagonal, interaction, YY block, XX block. In an optimized pair the odd
/// step keeps that order but drops the closing Ry(pi/2) layer; the even step
/// runs in reverse (XX, YY, interaction, diagonal) without its opening
/// Ry(-pi/2) layer, so the two layers that would cancel are never emitted.
inline Circuit build_cz_step_logical(const SiamParams& p, double dt, Parity parity,
                                     bool optimize) {
  detail::check_dt(dt);
  Circuit c(kSystemQubits);
  if (!optimize || parity == Parity::odd) {
    detail::append_diagonal(c, p, dt);
    detail::append_routed_interaction(c, p, dt);
    detail::append_yy_block(c, p, dt);
    detail::append_xx_block(c, p, dt, true, !optimize);
  } else {
    detail::append_xx_block(c, p, dt, false, true);
    detail::append_yy_block(c, p, dt);
    detail::append_routed_interaction(c, p, dt);
    detail::append_diagonal(c, p, dt);
  }
  return c;
}

/// exp(-i phi/2 Z_a Z_b) up to a global phase from two controlled-phase
/// gates, each conjugated by an X flip on one of the qubits.
inline Circuit zz_from_czphi(double phi, int a, int b, int n_qubits) {
  constexpr double pi = std::numbers::pi;
  Circuit c(n_qubits);
  c.append(Gate::rx(b, pi)).append(Gate::cz_phi(a, b, phi)).append(Gate::rx(b, pi));
  c.append(Gate::rx(a, pi)).append(Gate::cz_phi(a, b, phi)).append(Gate::rx(a, pi));
  return c;
}

inline Circuit zz_from_czphi(double phi) { return zz_from_czphi(phi, 0, 1, 2); }

/// Replaces every ZZ gate by its controlled-phase realization.
inline Circuit lower_zz(const Circuit& in) {
  Circuit out(in.n_qubits());
  for (const Gate& g : in.gates()) {
    if (g.kind == GateKind::zz) {
      out.append(zz_from_czphi(g.angle, g.targets[0], g.targets[1], in.n_qubits()));
    } else {
      out.append(g);
    }
  }
  return out;
}

inline Circuit build_cz_step(const SiamParams& p, double dt, Parity parity, bool optimize) {
  return lower_zz(build_cz_step_logical(p, dt, parity, optimize));
}

namespace detail {

inline Circuit build_evolution_impl(const TrotterPlan& plan, bool lowered) {
  plan.validate();
  const double dt = plan.dt();
  Circuit c(kSystemQubits);
  for (int k = 0; k < plan.n_steps; ++k) {
    if (plan.method == TrotterMethod::xy) {
      c.append(build_xy_step(plan.params, dt));
      continue;
    }
    // A trailing unpaired step is emitted unoptimized.
    const bool paired = plan.optimize_pairs && (k % 2 == 1 || k + 1 < plan.n_steps);
    const Parity parity = k % 2 == 0 ? Parity::odd : Parity::even;
    Circuit step = build_cz_step_logical(plan.params, dt, parity, paired);
    c.append(lowered ? lower_zz(step) : step);
  }
  return c;
}

}  // namespace detail

inline Circuit build_evolution(const TrotterPlan& plan) {
  return detail::build_evolution_impl(plan, true);
}

/// Tallies at the level of the method's native two-qubit blocks: each ZZ
/// counts once (its X flips belong to the block), each SWAP counts once and
/// contributes three controlled-phase gates to czphi_gates.
inline GateCount count_gates(const TrotterPlan& plan) {
  const Circuit logical = detail::build_evolution_impl(plan, false);
  GateCount n;
  for (const Gate& g : logical.gates()) {
    switch (g.kind) {
      case GateKind::zz:
        ++n.zz_gates;
        break;
      case GateKind::swap:
        ++n.swap_gates;
        break;
      case GateKind::xy:
        ++n.xy_gates;
        break;
      case GateKind::cz_phi:
        ++n.czphi_gates;
        break;
      default:
        if (g.is_single_qubit_rotation()) ++n.single_qubit_rotations;
        break;
    }
  }
  if (plan.method == TrotterMethod::cz) n.czphi_gates += 2 * n.zz_gates + 3 * n.swap_gates;
  return n;
}

inline double fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

/// 1 - |tr(A^dagger B)| / dim; zero iff A and B agree up to a global phase
/// (for unitaries).
inline double trace_infidelity(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix shapes differ");
  return 1.0 - std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

/// Spectral norm of A - B e^{i theta} with theta = arg tr(B^dagger A), the
/// phase that best aligns the two operators.
inline double phase_aligned_distance(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix shapes differ");
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  const DenseMatrix diff = a - b * phase;
  Eigen::JacobiSVD<DenseMatrix> svd(diff);
  return svd.singularValues()(0);
}

}  // namespace qdmft

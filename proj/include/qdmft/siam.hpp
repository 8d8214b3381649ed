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

// Two-site single-impurity Anderson model: parameters, the Jordan-Wigner
// spin Hamiltonian, exact diagonalization and the Lehmann Green function.
//
// Mode-to-qubit map: qubit 0 <-> impurity spin down, 1 <-> bath spin down,
// 2 <-> impurity spin up, 3 <-> bath spin up.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/errors.hpp"
#include "qdmft/pole_fit.hpp"
#include "qdmft/qsim.hpp"

namespace qdmft {

inline constexpr int kSystemQubits = 4;
inline constexpr Eigen::Index kSystemDim = 16;

/// Energies in units of t_star.
struct SiamParams {
  double u = 0.0;
  double mu = 0.0;
  double epsilon_c = 0.0;
  double v = 0.0;
  double t_star = 1.0;

  static SiamParams half_filled(double u, double v, double t_star = 1.0) {
    return {u, u / 2.0, 0.0, v, t_star};
  }

  bool is_half_filled(double tol = 1e-12) const {
    return std::abs(mu - u / 2.0) <= tol && std::abs(epsilon_c) <= tol;
  }

  void validate() const {
    if (!(t_star > 0.0)) throw DomainError("t_star must be positive");
    if (!(u >= 0.0)) throw DomainError("U must be nonnegative");
    if (!(v >= 0.0)) throw DomainError("V must be nonnegative");
    if (!std::isfinite(mu) || !std::isfinite(epsilon_c) || !std::isfinite(u) ||
        !std::isfinite(v)) {
      throw DomainError("SIAM parameters must be finite");
    }
  }

  friend bool operator==(const SiamParams&, const SiamParams&) = default;
};

enum class Spin { down, up };

inline int mode_qubit(int site, Spin spin) {
  if (site != 1 && site != 2) throw DomainError("site must be 1 (impurity) or 2 (bath)");
  return (site - 1) + (spin == Spin::up ? 2 : 0);
}

/// Tensor product of single-qubit operators on an n-qubit register; qubits
/// not listed carry the identity.
inline DenseMatrix embed_local(std::initializer_list<std::pair<int, Eigen::Matrix2cd>> factors,
                               int n_qubits = kSystemQubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  std::vector<Eigen::Matrix2cd> ops(static_cast<std::size_t>(n_qubits),
                                    Eigen::Matrix2cd::Identity());
  for (const auto& [q, m] : factors) {
    if (q < 0 || q >= n_qubits) throw DomainError("qubit out of range");
    ops[static_cast<std::size_t>(q)] = ops[static_cast<std::size_t>(q)] * m;
  }
  DenseMatrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      Complex v = 1.0;
      for (int q = 0; q < n_qubits && v != Complex(0.0); ++q) {
        v *= ops[static_cast<std::size_t>(q)]((r >> q) & 1, (c >> q) & 1);
      }
      out(r, c) = v;
    }
  }
  return out;
}

inline DenseMatrix pauli_string(std::initializer_list<std::pair<int, PauliAxis>> factors,
                                int n_qubits = kSystemQubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  DenseMatrix out = DenseMatrix::Identity(dim, dim);
  for (const auto& [q, axis] : factors) out = out * embed_local({{q, pauli_matrix(axis)}}, n_qubits);
  return out;
}

/// sigma^- = (X - iY)/2 = |1><0| raises the occupation of a mode.
inline Eigen::Matrix2cd sigma_minus() {
  Eigen::Matrix2cd m;
  m << 0, 0, 1, 0;
  return m;
}

/// Creation operator c^dagger_{site,spin} with the Jordan-Wigner sigma^z
/// string over all lower-indexed qubits.
inline DenseMatrix jw_creation_operator(int site, Spin spin) {
  const int q = mode_qubit(site, spin);
  DenseMatrix out = embed_local({{q, sigma_minus()}});
  for (int k = 0; k < q; ++k) out = embed_local({{k, pauli_matrix(PauliAxis::z)}}) * out;
  return out;
}

inline DenseMatrix jw_annihilation_operator(int site, Spin spin) {
  return jw_creation_operator(site, spin).adjoint();
}

inline DenseMatrix number_operator(int site, Spin spin) {
  return jw_creation_operator(site, spin) * jw_annihilation_operator(site, spin);
}

/// Jordan-Wigner transformed Hamiltonian with constants dropped:
///   U/4 (Z0 Z2 - Z0 - Z2) + mu/2 (Z0 + Z2) - eps_c/2 (Z1 + Z3)
///   + V/2 (X0 X1 + Y0 Y1 + X2 X3 + Y2 Y3)
inline DenseMatrix build_spin_hamiltonian(const SiamParams& p) {
  using enum PauliAxis;
  DenseMatrix h = DenseMatrix::Zero(kSystemDim, kSystemDim);
  h += (p.u / 4.0) * (pauli_string({{0, z}, {2, z}}) - pauli_string({{0, z}}) -
                      pauli_string({{2, z}}));
  h += (p.mu / 2.0) * (pauli_string({{0, z}}) + pauli_string({{2, z}}));
  h -= (p.epsilon_c / 2.0) * (pauli_string({{1, z}}) + pauli_string({{3, z}}));
  h += (p.v / 2.0) * (pauli_string({{0, x}, {1, x}}) + pauli_string({{0, y}, {1, y}}) +
                      pauli_string({{2, x}, {3, x}}) + pauli_string({{2, y}, {3, y}}));
  return h;
}

/// The SIAM in second quantization, assembled from Jordan-Wigner operator
/// products. Equals build_spin_hamiltonian up to a multiple of the identity.
inline DenseMatrix build_fermionic_hamiltonian(const SiamParams& p) {
  DenseMatrix h = p.u * number_operator(1, Spin::down) * number_operator(1, Spin::up);
  for (Spin s : {Spin::down, Spin::up}) {
    h -= p.mu * number_operator(1, s);
    h += p.epsilon_c * number_operator(2, s);
    const DenseMatrix hop = jw_creation_operator(1, s) * jw_annihilation_operator(2, s);
    h += p.v * (hop + hop.adjoint());
  }
  return h;
}

struct EigenSystem {
  Eigen::VectorXd energies;  // ascending
  DenseMatrix vectors;       // column j is eigenvector j

  double spectral_radius() const { return energies.cwiseAbs().maxCoeff(); }
};

inline EigenSystem diagonalize(const DenseMatrix& h) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline EigenSystem diagonalize(const SiamParams& p) {
  p.validate();
  return diagonalize(build_spin_hamiltonian(p));
}

inline constexpr double kDegeneracyTolerance = 1e-9;

/// Number of eigenstates within the degeneracy tolerance of the lowest one.
inline int ground_multiplicity(const EigenSystem& es) {
  const double tol = kDegeneracyTolerance * std::max(es.spectral_radius(), 1e-300);
  int m = 1;
  while (m < es.energies.size() && es.energies[m] - es.energies[0] < tol) ++m;
  return m;
}

/// Multiplies v by the phase that makes its largest-magnitude amplitude
/// real and positive (first index wins ties).
inline Eigen::VectorXcd fix_phase(Eigen::VectorXcd v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best_mag + 1e-12) {
      best_mag = std::abs(v[i]);
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v[best]) / std::abs(v[best]);
  return v;
}

struct GroundState {
  StateVector state;
  double energy = 0.0;
};

inline GroundState ground_state(const EigenSystem& es) {
  if (ground_multiplicity(es) > 1) {
    throw DegenerateGroundStateError("ground state is degenerate (gap " +
                                     std::to_string(es.energies[1] - es.energies[0]) + ")");
  }
  return {StateVector::normalized(kSystemQubits, fix_phase(es.vectors.col(0))), es.energies[0]};
}

inline GroundState ground_state(const SiamParams& p) { return ground_state(diagonalize(p)); }

/// exp(-i H tau) from the spectral decomposition.
inline DenseMatrix exact_propagator(const EigenSystem& es, double tau) {
  Eigen::VectorXcd phases(es.energies.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) phases[j] = std::exp(-kI * (es.energies[j] * tau));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

inline DenseMatrix exact_propagator(const SiamParams& p, double tau) {
  return exact_propagator(diagonalize(p), tau);
}

struct LehmannPole {
  double omega = 0.0;   // E_j - E_GS
  double weight = 0.0;  // squared matrix element
};

/// Particle poles |<j|c^dagger|GS>|^2 and hole poles |<j|c|GS>|^2 of the
/// impurity Green function, with excitation energies E_j - E_GS >= 0.
struct LehmannSpectrum {
  std::vector<LehmannPole> particle;
  std::vector<LehmannPole> hole;
};

namespace detail {

inline std::vector<LehmannPole> collect_poles(const EigenSystem& es, const Eigen::VectorXcd& excited) {
  constexpr double kMergeTol = 1e-9;
  constexpr double kWeightFloor = 1e-12;
  std::vector<LehmannPole> poles;
  for (Eigen::Index j = 0; j < es.energies.size(); ++j) {
    const double w = std::norm(es.vectors.col(j).dot(excited));
    if (w <= 0.0) continue;
    const double omega = es.energies[j] - es.energies[0];
    auto it = std::find_if(poles.begin(), poles.end(), [&](const LehmannPole& p) {
      return std::abs(p.omega - omega) < kMergeTol;
    });
    if (it == poles.end()) {
      poles.push_back({omega, w});
    } else {
      it->omega = (it->omega * it->weight + omega * w) / (it->weight + w);
      it->weight += w;
    }
  }
  std::erase_if(poles, [](const LehmannPole& p) { return p.weight <= kWeightFloor; });
  std::sort(poles.begin(), poles.end(),
            [](const LehmannPole& a, const LehmannPole& b) { return a.omega < b.omega; });
  return poles;
}

}  // namespace detail

inline LehmannSpectrum lehmann_spectrum(const SiamParams& p, Spin spin = Spin::down) {
  const EigenSystem es = diagonalize(p);
  const GroundState gs = ground_state(es);
  const Eigen::VectorXcd& psi = gs.state.amplitudes();
  const Eigen::VectorXcd added = jw_creation_operator(1, spin) * psi;
  const Eigen::VectorXcd removed = jw_annihilation_operator(1, spin) * psi;
  return {detail::collect_poles(es, added), detail::collect_poles(es, removed)};
}

/// Particle branch of the exact Green function as a PoleFit. At particle-hole
/// symmetry the hole branch mirrors it and this is the complete four-pole
/// Green function.
inline PoleFit lehmann_green(const SiamParams& p, Spin spin = Spin::down) {
  if (!(p.v > 0.0)) throw PreconditionError("lehmann_green requires V > 0");
  const LehmannSpectrum spec = lehmann_spectrum(p, spin);
  const auto& poles = spec.particle;
  if (poles.size() > 2) {
    throw InvariantError("more than two particle poles in the two-site Green function");
  }
  if (poles.empty()) return {};
  if (poles.size() == 1) return PoleFit::canonical(poles[0].weight, poles[0].omega, 0.0, 0.0);
  return PoleFit::canonical(poles[0].weight, poles[0].omega, poles[1].weight, poles[1].omega);
}

/// Exact Green function of the atomic limit (V = 0) at half filling: one
/// pole pair at +-U/2 carrying the full weight.
inline PoleFit atomic_limit_green(double u) { return PoleFit::canonical(0.5, u / 2.0, 0.0, 0.0); }

}  // namespace qdmft

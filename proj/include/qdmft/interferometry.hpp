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

// Ancilla interferometry for the retarded impurity Green function.
//
// A Ramsey sequence on a 5-qubit register (system qubits 0-3, ancilla 4)
// reads out F(tau) = <GS| U^dagger(tau) s_a U(tau) s_b |GS> from the
// ancilla coherence, where s is the Jordan-Wigner image of a Pauli on the
// impurity mode. Four such terms give the greater and lesser functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qdmft/errors.hpp"
#include "qdmft/qsim.hpp"
#include "qdmft/siam.hpp"
#include "qdmft/trotter.hpp"

namespace qdmft {

inline constexpr int kAncilla = 4;
inline constexpr int kRegisterQubits = 5;

/// A Trotter circuit on the system qubits or a dense 16x16 propagator.
using Evolution = std::variant<Circuit, DenseMatrix>;

struct RamseyTermSpec {
  PauliAxis alpha = PauliAxis::x;  // applied after the evolution
  PauliAxis beta = PauliAxis::x;   // applied before the evolution
  double tau = 0.0;                // informational; the evolution fixes the time
  Evolution evolution = DenseMatrix::Identity(kSystemDim, kSystemDim);
  Spin spin = Spin::down;
};

namespace detail {

inline void validate_ramsey_inputs(const RamseyTermSpec& spec, const StateVector& ground) {
  if (ground.n_qubits() != kSystemQubits) throw DomainError("ground state must have 4 qubits");
  if (spec.alpha == PauliAxis::z || spec.beta == PauliAxis::z) {
    throw DomainError("Ramsey terms use x or y Paulis only");
  }
  if (const auto* c = std::get_if<Circuit>(&spec.evolution)) {
    for (const Gate& g : c->gates()) {
      for (int q : g.active_targets()) {
        if (q >= kSystemQubits) throw DomainError("evolution circuit touches the ancilla");
      }
    }
  } else {
    const auto& m = std::get<DenseMatrix>(spec.evolution);
    if (m.rows() != kSystemDim || m.cols() != kSystemDim) {
      throw DomainError("evolution matrix must be 16x16");
    }
  }
}

// Controlled Jordan-Wigner image of sigma^axis on the impurity mode of the
// given spin; the string sigma^z_0 sigma^z_1 is controlled as well.
inline void apply_controlled_mode_pauli(StateVector& s, Spin spin, PauliAxis axis, int control_value) {
  if (spin == Spin::up) {
    apply_gate_in_place(s, Gate::controlled_pauli(kAncilla, 0, PauliAxis::z, control_value));
    apply_gate_in_place(s, Gate::controlled_pauli(kAncilla, 1, PauliAxis::z, control_value));
  }
  apply_gate_in_place(s, Gate::controlled_pauli(kAncilla, mode_qubit(1, spin), axis, control_value));
}

}  // namespace detail

/// Runs the five-step Ramsey protocol and returns
/// <sigma^z_anc> + i <sigma^y_anc> = <GS| U^dagger s_alpha U s_beta |GS>.
/// Only the Paulis are controlled; the evolution acts unconditionally.
inline Complex ramsey_term(const RamseyTermSpec& spec, const StateVector& ground) {
  detail::validate_ramsey_inputs(spec, ground);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << kRegisterQubits);
  amps.head(kSystemDim) = ground.amplitudes();
  StateVector s(kRegisterQubits, std::move(amps));

  apply_gate_in_place(s, Gate::h(kAncilla));
  detail::apply_controlled_mode_pauli(s, spec.spin, spec.beta, 0);
  if (const auto* c = std::get_if<Circuit>(&spec.evolution)) {
    for (const Gate& g : c->gates()) apply_gate_in_place(s, g);
  } else {
    static constexpr int system[] = {0, 1, 2, 3};
    s.apply_local(std::get<DenseMatrix>(spec.evolution), system);
  }
  detail::apply_controlled_mode_pauli(s, spec.spin, spec.alpha, 1);
  apply_gate_in_place(s, Gate::h(kAncilla));

  return {expectation_pauli(s, PauliAxis::z, kAncilla), expectation_pauli(s, PauliAxis::y, kAncilla)};
}

/// The four terms F_ab for a, b in {x, y}, indexed [a][b].
struct RamseyTerms {
  Complex f[2][2];
};

inline RamseyTerms measure_ramsey_terms(const Evolution& evolution, const StateVector& ground,
                                        Spin spin = Spin::down, double tau = 0.0) {
  RamseyTerms t{};
  const PauliAxis axes[2] = {PauliAxis::x, PauliAxis::y};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      t.f[a][b] = ramsey_term({axes[a], axes[b], tau, evolution, spin}, ground);
    }
  }
  return t;
}

// With c = (X + iY)/2 and c^dagger = (X - iY)/2 on the impurity mode:
//   G>(tau) = -i <c(tau) c^dagger>        = -i/4 (Fxx - i Fxy + i Fyx + Fyy)
//   G<(tau) =  i <c^dagger c(tau)>        =  i/4 (Fxx* + i Fyx* - i Fxy* + Fyy*)
// using <s_b U^dagger s_a U> = conj(F_ab).
inline Complex greater_from_terms(const RamseyTerms& t) {
  const Complex i = kI;
  return -i / 4.0 * (t.f[0][0] - i * t.f[0][1] + i * t.f[1][0] + t.f[1][1]);
}

inline Complex lesser_from_terms(const RamseyTerms& t) {
  const Complex i = kI;
  return i / 4.0 *
         (std::conj(t.f[0][0]) + i * std::conj(t.f[1][0]) - i * std::conj(t.f[0][1]) +
          std::conj(t.f[1][1]));
}

inline Complex greater_green(double tau, const Evolution& evolution, const StateVector& ground,
                             Spin spin = Spin::down) {
  return greater_from_terms(measure_ramsey_terms(evolution, ground, spin, tau));
}

inline Complex lesser_green(double tau, const Evolution& evolution, const StateVector& ground,
                            Spin spin = Spin::down) {
  return lesser_from_terms(measure_ramsey_terms(evolution, ground, spin, tau));
}

/// iG^R(tau) = i [G>(tau) - G<(tau)] for tau >= 0.
inline Complex retarded_from_terms(const RamseyTerms& t) {
  return kI * (greater_from_terms(t) - lesser_from_terms(t));
}

enum class EvolutionMethod { xy, cz, exact };

inline std::string to_string(EvolutionMethod m) {
  switch (m) {
    case EvolutionMethod::xy:
      return "xy";
    case EvolutionMethod::cz:
      return "cz";
    case EvolutionMethod::exact:
      return "exact";
  }
  throw InvariantError("unknown evolution method");
}

inline EvolutionMethod parse_evolution_method(const std::string& s) {
  if (s == "xy") return EvolutionMethod::xy;
  if (s == "cz") return EvolutionMethod::cz;
  if (s == "exact") return EvolutionMethod::exact;
  throw DomainError("unknown method '" + s + "' (expected xy, cz or exact)");
}

/// tau_k = k tau_max / n_points for k = 0..n_points; a single point when
/// tau_max = 0.
struct TimeGrid {
  double tau_max = 6.0;
  int n_points = 24;

  void validate() const {
    if (!(tau_max >= 0.0) || !std::isfinite(tau_max)) throw DomainError("tau_max must be >= 0");
    if (n_points < 1) throw DomainError("n_points must be >= 1");
  }

  std::vector<double> times() const {
    validate();
    if (tau_max == 0.0) return {0.0};
    std::vector<double> t(static_cast<std::size_t>(n_points) + 1);
    for (int k = 0; k <= n_points; ++k) t[static_cast<std::size_t>(k)] = k * tau_max / n_points;
    return t;
  }
};

struct GreenSeries {
  SiamParams params;
  EvolutionMethod method = EvolutionMethod::exact;
  int n_steps = 0;  // Trotter steps up to the last time; 0 for exact
  std::vector<double> times;
  std::vector<Complex> values;  // iG^R(tau_k)

  std::size_t size() const { return times.size(); }

  void validate() const {
    if (times.size() != values.size()) throw InvariantError("times and values differ in length");
    if (times.empty() || times.front() != 0.0) throw InvariantError("series must start at tau = 0");
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (!(times[k] > times[k - 1])) throw InvariantError("times must be strictly increasing");
    }
  }
};

/// Trotter steps used at time tau: the step size stays at tau_max / n_steps
/// or below, with at least one step.
inline int steps_for_time(double tau, double tau_max, int n_steps) {
  if (tau_max <= 0.0) return 1;
  // The small slack keeps exact multiples from rounding up.
  return std::max(1, static_cast<int>(std::ceil(n_steps * tau / tau_max - 1e-9)));
}

inline Evolution make_evolution(const SiamParams& p, const EigenSystem& es, EvolutionMethod method,
                                double tau, int n_steps) {
  if (method == EvolutionMethod::exact) return exact_propagator(es, tau);
  TrotterPlan plan;
  plan.method = method == EvolutionMethod::xy ? TrotterMethod::xy : TrotterMethod::cz;
  plan.n_steps = n_steps;
  plan.tau = tau;
  plan.params = p;
  return build_evolution(plan);
}

/// Measures iG^R on the grid. Trotterized methods use
/// N_k = max(1, ceil(n_steps tau_k / tau_max)) steps at tau_k.
inline GreenSeries measure_green_series(const SiamParams& p, const TimeGrid& grid,
                                        EvolutionMethod method, int n_steps,
                                        Spin spin = Spin::down) {
  p.validate();
  if (!(p.v > 0.0)) throw PreconditionError("Green function measurement requires V > 0");
  if (method != EvolutionMethod::exact && n_steps < 1) throw DomainError("n_steps must be >= 1");
  const EigenSystem es = diagonalize(p);
  const StateVector gs = ground_state(es).state;

  GreenSeries out;
  out.params = p;
  out.method = method;
  out.n_steps = method == EvolutionMethod::exact ? 0 : n_steps;
  out.times = grid.times();
  out.values.reserve(out.times.size());
  for (double tau : out.times) {
    const int steps = steps_for_time(tau, grid.tau_max, n_steps);
    const Evolution ev = make_evolution(p, es, method, tau, steps);
    out.values.push_back(retarded_from_terms(measure_ramsey_terms(ev, gs, spin, tau)));
  }
  return out;
}

enum class DegeneracyPolicy {
  strict,    // a degenerate ground state is an error
  ensemble,  // average over the degenerate manifold
};

/// n_imp = sum_sigma <n_{1 sigma}> = 1 - (<Z_0> + <Z_2>)/2 in the ground state.
inline double measure_filling(const SiamParams& p, DegeneracyPolicy policy = DegeneracyPolicy::strict) {
  const EigenSystem es = diagonalize(p);
  const auto filling_of = [](const StateVector& s) {
    return 1.0 - (expectation_pauli(s, PauliAxis::z, 0) + expectation_pauli(s, PauliAxis::z, 2)) / 2.0;
  };
  if (policy == DegeneracyPolicy::strict) return filling_of(ground_state(es).state);
  const int m = ground_multiplicity(es);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    acc += filling_of(StateVector::normalized(kSystemQubits, es.vectors.col(j)));
  }
  return acc / m;
}

/// Estimate of a Pauli expectation from `shots` projective measurements,
/// each +1 with probability (1 + expectation)/2. Deterministic in seed.
inline double sample_shots(double expectation, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("shots must be >= 1");
  const double p = (1.0 + expectation) / 2.0;
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw DomainError("expectation outside [-1, 1]");
  std::mt19937_64 rng(seed);
  // Uniform doubles drawn by hand: the standard distributions are not
  // reproducible across library implementations.
  std::int64_t hits = 0;
  for (std::int64_t k = 0; k < shots; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < p) ++hits;
  }
  return 2.0 * static_cast<double>(hits) / static_cast<double>(shots) - 1.0;
}

}  // namespace qdmft

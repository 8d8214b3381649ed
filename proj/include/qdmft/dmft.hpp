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

// Two-site DMFT self-consistency: measure the impurity Green function,
// extract Z, update the bath hybridization V^2 = Z t*^2 (Bethe lattice) and,
// away from half filling, the bath level eps_c by bisection on the filling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdmft/analysis.hpp"
#include "qdmft/errors.hpp"
#include "qdmft/interferometry.hpp"
#include "qdmft/pole_fit.hpp"
#include "qdmft/siam.hpp"

namespace qdmft {

struct DmftConfig {
  double u = 0.0;
  double mu = 0.0;  // ignored when half_filling (mu = U/2)
  double t_star = 1.0;
  EvolutionMethod method = EvolutionMethod::exact;
  int n_steps = 24;
  double tau_max = 6.0;
  int n_points = 24;
  double v_init = 1.0;
  double epsilon_c_init = 0.0;
  bool half_filling = true;
  double target_filling = 1.0;  // used when !half_filling
  double v_tol = 1e-4;
  double v_floor = 1e-4;
  int max_iter = 100;
  double mixing = 1.0;
  // Secant extrapolation of the fixed point in x = V^2. Off by default; it
  // rescues the critical slowing down of the plain map near U_c.
  bool accelerate = false;

  double effective_mu() const { return half_filling ? u / 2.0 : mu; }

  SiamParams params(double v, double epsilon_c) const {
    return {u, effective_mu(), half_filling ? 0.0 : epsilon_c, v, t_star};
  }

  TimeGrid grid() const { return {tau_max, n_points}; }

  void validate() const {
    if (!(t_star > 0.0)) throw DomainError("t_star must be positive");
    if (!(u >= 0.0)) throw DomainError("U must be nonnegative");
    if (!(v_floor >= 0.0)) throw DomainError("v_floor must be nonnegative");
    if (!(v_init > v_floor)) throw DomainError("v_init must exceed v_floor");
    if (!(mixing > 0.0 && mixing <= 1.0)) throw DomainError("mixing must lie in (0, 1]");
    if (!(v_tol > 0.0)) throw DomainError("v_tol must be positive");
    if (max_iter < 1) throw DomainError("max_iter must be >= 1");
    if (method != EvolutionMethod::exact && n_steps < 1) throw DomainError("n_steps must be >= 1");
    grid().validate();
  }
};

struct IterationRecord {
  int iteration = 0;
  double v_in = 0.0;
  double v_out = 0.0;   // sqrt(z) t*
  double v_next = 0.0;  // after mixing or extrapolation
  double z = 0.0;
  double epsilon_c = 0.0;
  double n_imp = 0.0;
  PoleFit fit;
  bool insulating_branch = false;  // Z forced to 0 by a self-energy pole at 0
};

enum class Phase { metallic, insulating };

inline std::string to_string(Phase p) { return p == Phase::metallic ? "metallic" : "insulating"; }

struct DmftResult {
  bool converged = false;
  Phase phase = Phase::metallic;
  double z_final = 0.0;
  double v_final = 0.0;
  double epsilon_c_final = 0.0;
  std::vector<IterationRecord> history;
  PoleFit final_fit;

  int iterations() const { return static_cast<int>(history.size()); }
};

/// A loop failure with the iterations completed before it.
class DmftFailure : public NumericalError {
 public:
  DmftFailure(const std::string& what, std::vector<IterationRecord> history)
      : NumericalError(what), history_(std::move(history)) {}
  const std::vector<IterationRecord>& history() const { return history_; }

 private:
  std::vector<IterationRecord> history_;
};

/// V = sqrt(Z) t*, from V^2 = Z M2 with M2 = t*^2 for the semicircle.
inline double update_v(double z, double t_star = 1.0) {
  if (!(z >= -1e-9 && z <= 1.0 + 1e-9)) throw DomainError("Z outside [0, 1]");
  if (!(t_star > 0.0)) throw DomainError("t_star must be positive");
  return std::sqrt(std::clamp(z, 0.0, 1.0)) * t_star;
}

/// Bisection state for eps_c, carried across DMFT iterations.
struct EpsilonCBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool initialized = false;
};

namespace detail {

inline double filling_residual(const DmftConfig& c, double v, double eps, double target) {
  return measure_filling(c.params(v, eps), DegeneracyPolicy::ensemble) - target;
}

// True when the sign change of the residual inside [lo, hi] is a root
// rather than a jump: bisecting the cell down to 1e-9 leaves a residual
// near zero at one end.
inline bool continuous_sign_change(const DmftConfig& c, double v, double target, double lo, double hi) {
  double f_lo = filling_residual(c, v, lo, target);
  while (hi - lo > 1e-9 * c.t_star) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = filling_residual(c, v, mid, target);
    if (f_lo * f_mid <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return std::min(std::abs(f_lo), std::abs(filling_residual(c, v, hi, target))) < 1e-6;
}

// Finds [lo, hi] with a sign change of n_imp - target. The filling of the
// two-site cluster jumps at ground-state level crossings, so both ends of
// the search interval can lie on the same side of the target while roots
// sit inside, and a jump across the target looks like a root. The interval
// is therefore scanned; genuine roots win over jumps, then the cell nearest
// to `current`. The interval starts at [-4 t*, 4 t*] and is doubled up to
// three times.
inline void ensure_bracket(const DmftConfig& c, double v, double target, double current,
                           EpsilonCBracket& b) {
  if (b.initialized &&
      filling_residual(c, v, b.lo, target) * filling_residual(c, v, b.hi, target) <= 0.0) {
    return;
  }
  constexpr int kScanCells = 64;
  double half = 4.0 * c.t_star;
  for (int widen = 0; widen <= 3; ++widen, half *= 2.0) {
    const double step = 2.0 * half / kScanCells;
    // Ranked by (is a jump, distance to current).
    std::pair<int, double> best{2, std::numeric_limits<double>::infinity()};
    double prev_x = -half;
    double prev_f = filling_residual(c, v, prev_x, target);
    for (int k = 1; k <= kScanCells; ++k) {
      const double x = -half + k * step;
      const double f = filling_residual(c, v, x, target);
      if (prev_f * f <= 0.0) {
        const std::pair<int, double> rank{continuous_sign_change(c, v, target, prev_x, x) ? 0 : 1,
                                          std::abs(0.5 * (prev_x + x) - current)};
        if (rank < best) {
          best = rank;
          b = {prev_x, x, true};
        }
      }
      prev_x = x;
      prev_f = f;
    }
    if (best.first < 2) return;
  }
  throw BracketingError("filling " + std::to_string(target) +
                        " not bracketed by eps_c in [-32 t*, 32 t*]");
}

}  // namespace detail

/// One bisection refinement of eps_c towards n_imp(eps_c) = target_n at
/// hybridization v. The current value splits the bracket when it lies
/// inside; the midpoint of the surviving half is returned. A current value
/// that already hits the target is returned unchanged.
inline double update_epsilon_c(const DmftConfig& c, double v, double target_n, double current,
                               EpsilonCBracket& bracket) {
  constexpr double kFillingTol = 1e-10;
  const double f_cur = detail::filling_residual(c, v, current, target_n);
  if (std::abs(f_cur) <= kFillingTol) return current;
  detail::ensure_bracket(c, v, target_n, current, bracket);
  double split = current;
  double f_split = f_cur;
  if (!(split > bracket.lo && split < bracket.hi)) {
    split = (bracket.lo + bracket.hi) / 2.0;
    f_split = detail::filling_residual(c, v, split, target_n);
    if (std::abs(f_split) <= kFillingTol) return split;
  }
  const double f_lo = detail::filling_residual(c, v, bracket.lo, target_n);
  if (f_lo * f_split <= 0.0) {
    bracket.hi = split;
  } else {
    bracket.lo = split;
  }
  return (bracket.lo + bracket.hi) / 2.0;
}

inline double update_epsilon_c(const DmftConfig& c, double v, double target_n, double current) {
  EpsilonCBracket b;
  return update_epsilon_c(c, v, target_n, current, b);
}

namespace detail {

inline DmftResult insulating_result(const DmftConfig& c, std::vector<IterationRecord> history,
                                    double epsilon_c) {
  DmftResult r;
  r.converged = true;
  r.phase = Phase::insulating;
  r.z_final = 0.0;
  r.v_final = 0.0;
  r.epsilon_c_final = epsilon_c;
  r.history = std::move(history);
  r.final_fit = atomic_limit_green(c.u);
  return r;
}

}  // namespace detail

/// Measured Z at hybridization v; a self-energy pole at the Fermi level
/// counts as Z = 0.
struct ZMeasurement {
  PoleFit fit;
  double z = 0.0;
  bool insulating_branch = false;
};

inline ZMeasurement measure_z(const DmftConfig& c, double v, double epsilon_c) {
  const SiamParams p = c.params(v, epsilon_c);
  const GreenSeries series = measure_green_series(p, c.grid(), c.method, c.n_steps);
  ZMeasurement m;
  m.fit = fit_two_cosine(series);
  try {
    m.z = quasiparticle_weight(m.fit, p);
  } catch (const InsulatingBranchError&) {
    m.z = 0.0;
    m.insulating_branch = true;
  }
  return m;
}

inline DmftResult run(const DmftConfig& c) {
  c.validate();
  std::vector<IterationRecord> history;
  double v = c.v_init;
  double eps = c.half_filling ? 0.0 : c.epsilon_c_init;
  EpsilonCBracket bracket;
  std::optional<std::pair<double, double>> prev;  // (x, g) with x = V^2, g = Z - x

  for (int it = 0; it < c.max_iter; ++it) {
    IterationRecord rec;
    rec.iteration = it + 1;
    rec.v_in = v;
    rec.epsilon_c = eps;
    try {
      const ZMeasurement m = measure_z(c, v, eps);
      rec.fit = m.fit;
      rec.z = m.z;
      rec.insulating_branch = m.insulating_branch;
      rec.n_imp = measure_filling(c.params(v, eps), DegeneracyPolicy::ensemble);
      rec.v_out = update_v(m.z, c.t_star);
      rec.v_next = c.mixing * rec.v_out + (1.0 - c.mixing) * v;
      if (c.accelerate && !m.insulating_branch) {
        const double x = v * v;
        const double g = m.z * c.t_star * c.t_star - x;
        if (prev && g != prev->second) {
          const double x_new = x - g * (x - prev->first) / (g - prev->second);
          // An extrapolated fixed point at or below zero is the V = 0 branch.
          if (x_new <= 0.0) {
            rec.v_next = 0.0;
          } else if (x_new <= c.t_star * c.t_star) {
            rec.v_next = std::sqrt(x_new);
          }
        }
        prev = {x, g};
      }
      if (!c.half_filling) eps = update_epsilon_c(c, v, c.target_filling, eps, bracket);
    } catch (const Error& e) {
      throw DmftFailure(std::string("DMFT iteration ") + std::to_string(rec.iteration) +
                            " failed: " + e.what(),
                        std::move(history));
    }
    history.push_back(rec);

    if (rec.v_next < c.v_floor) return detail::insulating_result(c, std::move(history), eps);
    if (std::abs(rec.v_next - rec.v_in) < c.v_tol) {
      DmftResult r;
      r.converged = true;
      r.phase = Phase::metallic;
      r.z_final = rec.z;
      r.v_final = rec.v_out;
      r.epsilon_c_final = eps;
      r.final_fit = rec.fit;
      r.history = std::move(history);
      return r;
    }
    v = rec.v_next;
  }

  DmftResult r;
  r.converged = false;
  r.phase = Phase::metallic;
  const IterationRecord& last = history.back();
  r.z_final = last.z;
  r.v_final = last.v_out;
  r.epsilon_c_final = eps;
  r.final_fit = last.fit;
  r.history = std::move(history);
  return r;
}

struct SweepPoint {
  double u = 0.0;
  std::optional<DmftResult> result;
  std::string error;  // set when the run failed

  bool ok() const { return result.has_value(); }
};

/// Runs the loop for each U. Along ascending U the previous metallic V
/// seeds the next run; failures are recorded and the sweep continues.
inline std::vector<SweepPoint> sweep_z(const DmftConfig& base, const std::vector<double>& u_values) {
  std::vector<SweepPoint> out;
  double warm = 0.0;  // previous V_final, 0 when unusable
  for (std::size_t i = 0; i < u_values.size(); ++i) {
    DmftConfig c = base;
    c.u = u_values[i];
    const bool ascending = i > 0 && u_values[i] > u_values[i - 1];
    if (ascending && warm > c.v_floor) c.v_init = warm;
    SweepPoint pt;
    pt.u = c.u;
    try {
      pt.result = run(c);
      warm = pt.result->v_final;
    } catch (const Error& e) {
      pt.error = e.what();
      warm = 0.0;
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace qdmft

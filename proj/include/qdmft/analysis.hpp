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

// Post-processing of the impurity Green function: two-cosine fit, the
// four-pole frequency-domain Green function, Dyson self-energy,
// quasiparticle weight and the Bethe-lattice spectral function.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/errors.hpp"
#include "qdmft/interferometry.hpp"
#include "qdmft/pole_fit.hpp"
#include "qdmft/siam.hpp"

namespace qdmft {

struct FitOptions {
  int grid_size = 200;
  int polish_iterations = 50;
  int polish_starts = 16;  // distinct grid minima polished
  double sum_penalty = 1e3;   // weight of (alpha1 + alpha2 - 1/2)^2
  double max_rms = 0.05;
  std::size_t min_points = 12;
  double max_imag = 1e-6;
};

namespace detail {

struct TwoCosineModel {
  std::span<const double> t;
  std::span<const double> y;
  double penalty_sqrt;

  // Residual vector: K data rows followed by the sum-rule row.
  Eigen::VectorXd residual(const Eigen::Vector4d& p) const {
    const Eigen::Index k = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd r(k + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double ti = t[static_cast<std::size_t>(i)];
      r[i] = 2.0 * (p[0] * std::cos(p[1] * ti) + p[2] * std::cos(p[3] * ti)) -
             y[static_cast<std::size_t>(i)];
    }
    r[k] = penalty_sqrt * (p[0] + p[2] - 0.5);
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::Vector4d& p) const {
    const Eigen::Index k = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd j(k + 1, 4);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double ti = t[static_cast<std::size_t>(i)];
      j(i, 0) = 2.0 * std::cos(p[1] * ti);
      j(i, 1) = -2.0 * p[0] * ti * std::sin(p[1] * ti);
      j(i, 2) = 2.0 * std::cos(p[3] * ti);
      j(i, 3) = -2.0 * p[2] * ti * std::sin(p[3] * ti);
    }
    j.row(k) << penalty_sqrt, 0.0, penalty_sqrt, 0.0;
    return j;
  }

  double data_rms(const Eigen::Vector4d& p) const {
    const Eigen::VectorXd r = residual(p);
    return std::sqrt(r.head(r.size() - 1).squaredNorm() / static_cast<double>(t.size()));
  }
};

// Levenberg-Marquardt on (a1, w1, a2, w2) with a1, a2 >= 0.
inline Eigen::Vector4d polish(const TwoCosineModel& model, Eigen::Vector4d p, int iterations) {
  Eigen::VectorXd r = model.residual(p);
  double cost = r.squaredNorm();
  double damping = 1e-3;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::MatrixXd j = model.jacobian(p);
    const Eigen::Matrix4d jtj = j.transpose() * j;
    const Eigen::Vector4d g = j.transpose() * r;
    Eigen::Matrix4d a = jtj;
    for (int d = 0; d < 4; ++d) a(d, d) += damping * std::max(jtj(d, d), 1e-12);
    const Eigen::Vector4d step = a.ldlt().solve(-g);
    Eigen::Vector4d trial = p + step;
    trial[0] = std::max(trial[0], 0.0);
    trial[2] = std::max(trial[2], 0.0);
    trial[1] = std::abs(trial[1]);
    trial[3] = std::abs(trial[3]);
    const Eigen::VectorXd rt = model.residual(trial);
    const double ct = rt.squaredNorm();
    if (ct < cost) {
      p = trial;
      r = rt;
      cost = ct;
      damping = std::max(damping / 3.0, 1e-15);
    } else {
      damping *= 4.0;
      if (damping > 1e12) break;
    }
  }
  return p;
}

// Best nonnegative residues for fixed frequencies i, j of the grid, from
// the precomputed normal equations. Returns {cost, a_i, a_j}.
inline std::array<double, 3> solve_residues(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                                            double yy, double lambda, Eigen::Index i, Eigen::Index j) {
  const auto cost = [&](double ai, double aj) {
    const double fit = gram(i, i) * ai * ai + 2.0 * gram(i, j) * ai * aj + gram(j, j) * aj * aj;
    const double s = ai + aj - 0.5;
    return yy - 2.0 * (ai * rhs[i] + aj * rhs[j]) + fit + lambda * s * s;
  };
  const double bi = rhs[i] + lambda / 2.0;
  const double bj = rhs[j] + lambda / 2.0;
  const double mii = gram(i, i) + lambda;
  const double mjj = gram(j, j) + lambda;
  const double mij = gram(i, j) + lambda;

  std::array<double, 3> best{cost(0.0, 0.0), 0.0, 0.0};
  const auto consider = [&](double ai, double aj) {
    if (ai < 0.0 || aj < 0.0) return;
    const double c = cost(ai, aj);
    if (c < best[0]) best = {c, ai, aj};
  };
  consider(bi / mii, 0.0);
  if (i != j) {
    consider(0.0, bj / mjj);
    const double det = mii * mjj - mij * mij;
    if (det > 1e-12 * mii * mjj) consider((mjj * bi - mij * bj) / det, (mii * bj - mij * bi) / det);
  }
  return best;
}

}  // namespace detail

/// Least-squares fit of y(t) to 2 [a1 cos(w1 t) + a2 cos(w2 t)] with
/// a1, a2 >= 0 and a soft sum rule a1 + a2 = 1/2. Frequencies are searched
/// on a uniform grid over [0, omega_max] with the residues solved exactly at
/// each node, then all four parameters are polished by Levenberg-Marquardt.
inline PoleFit fit_two_cosine(std::span<const double> t, std::span<const double> y, double omega_max,
                              const FitOptions& opt = {}) {
  if (t.size() != y.size()) throw DomainError("time and value arrays differ in length");
  if (t.size() < opt.min_points) {
    throw PreconditionError("fit needs at least " + std::to_string(opt.min_points) + " points");
  }
  if (!(omega_max > 0.0) || !std::isfinite(omega_max)) throw DomainError("omega_max must be positive");
  const Eigen::Index k = static_cast<Eigen::Index>(t.size());
  const Eigen::Index n = opt.grid_size;
  const double lambda = opt.sum_penalty;

  Eigen::VectorXd omegas = Eigen::VectorXd::LinSpaced(n, 0.0, omega_max);
  Eigen::MatrixXd basis(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < k; ++m) basis(i, m) = 2.0 * std::cos(omegas[i] * t[static_cast<std::size_t>(m)]);
  }
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), k);
  const Eigen::MatrixXd gram = basis * basis.transpose();
  const Eigen::VectorXd rhs = basis * yv;
  const double yy = yv.squaredNorm();

  // Node costs; the best few distinct basins are polished.
  struct Node {
    double cost;
    Eigen::Index i, j;
    double ai, aj;
  };
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const auto cand = detail::solve_residues(gram, rhs, yy, lambda, i, j);
      nodes.push_back({cand[0], i, j, cand[1], cand[2]});
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.cost < b.cost; });
  std::vector<Node> starts;
  for (const Node& nd : nodes) {
    if (static_cast<int>(starts.size()) >= opt.polish_starts) break;
    const bool near = std::any_of(starts.begin(), starts.end(), [&](const Node& s) {
      return std::abs(s.i - nd.i) <= 3 && std::abs(s.j - nd.j) <= 3;
    });
    if (!near) starts.push_back(nd);
  }

  const detail::TwoCosineModel model{t, y, std::sqrt(lambda)};
  Eigen::Vector4d p = Eigen::Vector4d::Zero();
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Node& s : starts) {
    const Eigen::Vector4d q = detail::polish(model, {s.ai, omegas[s.i], s.aj, omegas[s.j]},
                                             opt.polish_iterations);
    const double c = model.residual(q).squaredNorm();
    if (c < best_cost) {
      best_cost = c;
      p = q;
    }
  }

  // Partner scan: hold one polished frequency, search the other over the
  // grid again. Recovers weak poles that the joint grid search hid behind
  // the discretization error of the strong one.
  const auto column = [&](double w) {
    Eigen::VectorXd c(k);
    for (Eigen::Index m = 0; m < k; ++m) c[m] = 2.0 * std::cos(w * t[static_cast<std::size_t>(m)]);
    return c;
  };
  for (int pass = 0; pass < 2; ++pass) {
    bool improved = false;
    for (int keep : {1, 3}) {
      const double wf = p[keep];
      const Eigen::VectorXd cf = column(wf);
      Eigen::MatrixXd g2(n + 1, n + 1);
      Eigen::VectorXd r2(n + 1);
      g2.topLeftCorner(n, n) = gram;
      const Eigen::VectorXd cross = basis * cf;
      g2.block(0, n, n, 1) = cross;
      g2.block(n, 0, 1, n) = cross.transpose();
      g2(n, n) = cf.squaredNorm();
      r2.head(n) = rhs;
      r2[n] = cf.dot(yv);
      Node best_partner{std::numeric_limits<double>::infinity(), 0, 0, 0.0, 0.0};
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto cand = detail::solve_residues(g2, r2, yy, lambda, n, j);
        if (cand[0] < best_partner.cost) best_partner = {cand[0], n, j, cand[1], cand[2]};
      }
      const Eigen::Vector4d q = detail::polish(
          model, {best_partner.ai, wf, best_partner.aj, omegas[best_partner.j]}, opt.polish_iterations);
      const double c = model.residual(q).squaredNorm();
      if (c < best_cost * (1.0 - 1e-12)) {
        best_cost = c;
        p = q;
        improved = true;
      }
    }
    if (!improved) break;
  }

  const double rms = model.data_rms(p);
  if (!(rms <= opt.max_rms)) {
    throw PoorFitError("two-cosine fit rms residual " + std::to_string(rms) + " exceeds " +
                           std::to_string(opt.max_rms),
                       rms);
  }
  return PoleFit::canonical(p[0], p[1], p[2], p[3], rms);
}

/// Fit bound U/2 + 4V + |mu| on the pole frequencies.
inline double fit_frequency_bound(const SiamParams& p) {
  return std::max(p.u / 2.0 + 4.0 * p.v + std::abs(p.mu), 1e-3 * p.t_star);
}

/// Fits the real part of a measured series. The values must be real, as
/// they are at particle-hole symmetry.
inline PoleFit fit_two_cosine(const GreenSeries& series, const FitOptions& opt = {}) {
  series.validate();
  std::vector<double> re(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (std::abs(series.values[k].imag()) > opt.max_imag) {
      throw PreconditionError("fit requires a real Green function (particle-hole symmetry)");
    }
    re[k] = series.values[k].real();
  }
  return fit_two_cosine(series.times, re, fit_frequency_bound(series.params), opt);
}

/// Real frequencies with a common broadening eta.
struct FrequencyGrid {
  std::vector<double> omegas;
  double eta = 0.01;

  static FrequencyGrid uniform(double lo, double hi, int n, double eta) {
    if (n < 2 || !(hi > lo)) throw DomainError("frequency grid needs n >= 2 and hi > lo");
    if (!(eta >= 0.0)) throw DomainError("eta must be >= 0");
    FrequencyGrid g;
    g.eta = eta;
    g.omegas.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g.omegas[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return g;
  }

  static FrequencyGrid standard() { return uniform(-8.0, 8.0, 1601, 0.01); }

  std::size_t size() const { return omegas.size(); }
  Complex point(std::size_t i) const { return {omegas[i], eta}; }
};

inline constexpr double kPoleTolerance = 1e-9;

/// G(z) = sum_j alpha_j [1/(z - omega_j) + 1/(z + omega_j)].
inline Complex green_at(const PoleFit& fit, Complex z) {
  Complex g = 0.0;
  for (const auto& [a, w] : {std::pair{fit.alpha1, fit.omega1}, std::pair{fit.alpha2, fit.omega2}}) {
    if (a == 0.0) continue;
    for (double pole : {w, -w}) {
      if (std::abs(z - pole) < kPoleTolerance) {
        throw SingularityError("frequency within 1e-9 of a Green-function pole");
      }
      g += a / (z - pole);
    }
  }
  return g;
}

inline std::vector<Complex> green_frequency(const PoleFit& fit, const FrequencyGrid& grid) {
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = green_at(fit, grid.point(i));
  return out;
}

/// Delta(omega) = V^2 / (omega - eps_c).
inline Complex hybridization(const SiamParams& p, Complex omega) {
  if (p.v == 0.0) return 0.0;
  if (std::abs(omega - p.epsilon_c) < 1e-12) throw SingularityError("omega at the bath level");
  return p.v * p.v / (omega - p.epsilon_c);
}

/// 1 / G0(omega) = omega + mu - Delta(omega).
inline Complex noninteracting_green_inverse(const SiamParams& p, Complex omega) {
  return omega + p.mu - hybridization(p, omega);
}

/// Sigma(z) = z + mu - Delta(z) - 1/G(z), Hartree shift included.
inline Complex self_energy_at(const PoleFit& fit, const SiamParams& p, Complex z) {
  const Complex g = green_at(fit, z);
  if (std::abs(g) < 1e-12) throw SingularityError("Green function vanishes; self-energy pole");
  return noninteracting_green_inverse(p, z) - 1.0 / g;
}

enum class SingularPolicy {
  error,  // any singular grid point throws
  limit,  // removable points take their two-sided limit; poles become +inf
};

struct SelfEnergyEval {
  std::vector<double> omegas;
  double eta = 0.0;
  std::vector<Complex> values;
  std::optional<double> z_weight;
};

namespace detail {

// Residue below which a singularity of Sigma on the real axis is treated as
// removable (fit noise) rather than a pole.
inline constexpr double kRemovableResidue = 1e-3;

inline Complex self_energy_limit(const PoleFit& fit, const SiamParams& p, double omega) {
  constexpr double delta = 1e-6;
  const Complex lo = self_energy_at(fit, p, omega - delta);
  const Complex hi = self_energy_at(fit, p, omega + delta);
  const double residue = std::abs(hi - lo) * delta / 2.0;
  if (residue > kRemovableResidue * p.t_star * p.t_star) {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  return (lo + hi) / 2.0;
}

}  // namespace detail

inline SelfEnergyEval dyson_self_energy(const PoleFit& fit, const SiamParams& p, const FrequencyGrid& grid,
                                        SingularPolicy policy = SingularPolicy::error) {
  SelfEnergyEval out;
  out.omegas = grid.omegas;
  out.eta = grid.eta;
  out.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      out.values[i] = self_energy_at(fit, p, grid.point(i));
    } catch (const SingularityError&) {
      if (policy == SingularPolicy::error || grid.eta != 0.0) throw;
      out.values[i] = detail::self_energy_limit(fit, p, grid.omegas[i]);
    }
  }
  return out;
}

/// Positive pole of the fitted self-energy at particle-hole symmetry, the
/// zero of G(omega) = omega sum_j 2 alpha_j / (omega^2 - omega_j^2).
inline double self_energy_pole(const PoleFit& fit) {
  const double w = fit.weight_sum();
  if (!(w > 0.0)) throw DomainError("fit carries no weight");
  return std::sqrt((fit.alpha1 * fit.omega2 * fit.omega2 + fit.alpha2 * fit.omega1 * fit.omega1) / w);
}

/// Z = [1 - d Re Sigma / d omega]^{-1} at omega = 0 by a central difference
/// of step h on the real axis, clamped to [0, 1].
///
/// At particle-hole symmetry Sigma - mu = omega - (V^2 + 1/g(omega^2))/omega
/// with G = omega g(omega^2). The exact Green function makes the 1/omega
/// residue R0 = 1/S - V^2 (S = sum 2 alpha_j / omega_j^2) vanish; a fitted
/// one leaves a small R0 that is removed before differentiating.
inline constexpr double kMaxZeroResidue = 0.5;

inline double quasiparticle_weight(const PoleFit& fit, const SiamParams& p, double h = 1e-3) {
  if (!(h > 0.0)) throw DomainError("step h must be positive");
  if (p.epsilon_c != 0.0) {
    throw PreconditionError("quasiparticle weight requires the particle-hole symmetric bath (eps_c = 0)");
  }
  if (!(p.v > 0.0)) throw InsulatingBranchError("V = 0: self-energy pole at the Fermi level");
  double s = 0.0;
  for (const auto& [a, w] : {std::pair{fit.alpha1, fit.omega1}, std::pair{fit.alpha2, fit.omega2}}) {
    if (a == 0.0) continue;
    if (w < kPoleTolerance) throw InsulatingBranchError("Green-function pole at the Fermi level");
    s += 2.0 * a / (w * w);
  }
  if (!(s > 0.0)) throw DomainError("fit carries no weight");
  if (self_energy_pole(fit) <= h) {
    throw InsulatingBranchError("self-energy pole within the differentiation step");
  }
  const double r0 = 1.0 / s - p.v * p.v;
  // A residue comparable to V^2 is not noise: the fit has not resolved the
  // low-frequency pole and its self-energy diverges at the Fermi level.
  if (std::abs(r0) > kMaxZeroResidue * p.v * p.v) {
    throw InsulatingBranchError("fitted self-energy has a pole at the Fermi level");
  }
  const auto regular = [&](double w) { return self_energy_at(fit, p, w).real() - r0 / w; };
  const double slope = (regular(h) - regular(-h)) / (2.0 * h);
  const double z = 1.0 / (1.0 - slope);
  if (!std::isfinite(z)) throw InsulatingBranchError("divergent self-energy slope");
  return std::clamp(z, 0.0, 1.0);
}

/// Semicircular density of states of the Bethe lattice with hopping t*.
inline double bethe_dos(double epsilon, double t_star = 1.0) {
  if (!(t_star > 0.0)) throw DomainError("t_star must be positive");
  const double r = 4.0 * t_star * t_star - epsilon * epsilon;
  if (r <= 0.0) return 0.0;
  return std::sqrt(r) / (2.0 * std::numbers::pi * t_star * t_star);
}

/// A(omega) = rho_0(omega + mu - Re Sigma(omega)); a pole of Sigma gives 0.
inline std::vector<double> spectral_function(const SelfEnergyEval& se, const SiamParams& p) {
  std::vector<double> a(se.omegas.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double re = se.values[i].real();
    a[i] = std::isfinite(re) ? bethe_dos(se.omegas[i] + p.mu - re, p.t_star) : 0.0;
  }
  return a;
}

inline std::vector<double> spectral_function(const SelfEnergyEval& se, const SiamParams& p,
                                             const FrequencyGrid& grid) {
  if (grid.omegas != se.omegas) throw DomainError("self-energy was evaluated on a different grid");
  return spectral_function(se, p);
}

}  // namespace qdmft

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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdmft/analysis.hpp"

namespace qdmft {
namespace {

const SiamParams kU4{4, 2, 0, 1};
constexpr double kZU4V1 = 0.69230769230769196;

std::vector<double> default_times() { return TimeGrid{}.times(); }

std::vector<double> sample_cosines(const PoleFit& f, const std::vector<double>& t) {
  std::vector<double> y(t.size());
  for (std::size_t k = 0; k < t.size(); ++k)
    y[k] = 2 * (f.alpha1 * std::cos(f.omega1 * t[k]) + f.alpha2 * std::cos(f.omega2 * t[k]));
  return y;
}

TEST(FitTwoCosine, SingleCosine) {
  const auto t = default_times();
  const PoleFit f = fit_two_cosine(t, sample_cosines({0.5, 1.3, 0, 0}, t), 6.0);
  EXPECT_NEAR(f.alpha1, 0.5, 1e-6);
  EXPECT_NEAR(f.omega1, 1.3, 1e-6);
  EXPECT_NEAR(f.alpha2, 0.0, 1e-6);
  EXPECT_FALSE(f.second_pole_identifiable());
}

TEST(FitTwoCosine, AtomicLimit) {
  const auto t = default_times();
  const PoleFit f = fit_two_cosine(t, sample_cosines({0.5, 3.0, 0, 0}, t), 8.0);
  EXPECT_NEAR(f.alpha1, 0.5, 1e-6);
  EXPECT_NEAR(f.omega1, 3.0, 1e-6);
}

TEST(FitTwoCosine, ExactSeriesRecoversLehmannPoles) {
  const PoleFit f = fit_two_cosine(measure_green_series(kU4, {}, EvolutionMethod::exact, 0));
  const PoleFit g = lehmann_green(kU4);
  EXPECT_NEAR(f.alpha1, g.alpha1, 1e-6);
  EXPECT_NEAR(f.omega1, g.omega1, 1e-6);
  EXPECT_NEAR(f.alpha2, g.alpha2, 1e-6);
  EXPECT_NEAR(f.omega2, g.omega2, 1e-6);
  EXPECT_LT(f.rms_residual, 1e-8);
}

TEST(FitTwoCosine, RandomRoundTrip) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> d(0, 1);
  const auto t = default_times();
  for (int trial = 0; trial < 100; ++trial) {
    const double a1 = 0.05 + 0.4 * d(rng);
    double w1 = 0.2 + 5.5 * d(rng), w2 = 0.2 + 5.5 * d(rng);
    while (std::abs(w1 - w2) <= 0.1) w2 = 0.2 + 5.5 * d(rng);
    const PoleFit truth = PoleFit::canonical(a1, w1, 0.5 - a1, w2);
    const PoleFit f = fit_two_cosine(t, sample_cosines(truth, t), 6.0);
    EXPECT_NEAR(f.alpha1, truth.alpha1, 1e-6) << trial;
    EXPECT_NEAR(f.omega1, truth.omega1, 1e-6) << trial;
    EXPECT_NEAR(f.alpha2, truth.alpha2, 1e-6) << trial;
    EXPECT_NEAR(f.omega2, truth.omega2, 1e-6) << trial;
    EXPECT_NEAR(f.weight_sum(), 0.5, 1e-6);
    EXPECT_LE(f.omega1, f.omega2);
  }
}

TEST(FitTwoCosine, PoorFitIsReported) {
  const auto t = default_times();
  std::vector<double> y(t.size());
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> d(-1, 1);
  for (auto& v : y) v = d(rng);
  EXPECT_THROW(fit_two_cosine(t, y, 6.0), PoorFitError);
}

TEST(FitTwoCosine, Preconditions) {
  const std::vector<double> t{0, 1, 2, 3};
  EXPECT_THROW(fit_two_cosine(t, t, 6.0), PreconditionError);
  GreenSeries s = measure_green_series({4, 1.5, 0.3, 1}, {}, EvolutionMethod::exact, 0);
  EXPECT_THROW(fit_two_cosine(s), PreconditionError);
}

TEST(GreenFrequency, HighFrequencyTail) {
  const PoleFit f{0.5, 1.0, 0, 1.0};
  for (double w : {50.0, 200.0}) {
    const Complex g = green_at(f, w);
    EXPECT_LT(std::abs(g - 1.0 / w), 2.0 / std::pow(w, 3));
  }
}

TEST(GreenFrequency, OddAtHalfFilling) {
  const auto g = green_frequency(lehmann_green(kU4), FrequencyGrid::standard());
  EXPECT_NEAR(g[800].real(), 0.0, 1e-12);
  for (std::size_t i = 0; i < 800; ++i) EXPECT_NEAR(g[i].real(), -g[1600 - i].real(), 1e-10);
}

TEST(GreenFrequency, FittedCurveMatchesLehmann) {
  const PoleFit f = fit_two_cosine(measure_green_series(kU4, {}, EvolutionMethod::exact, 0));
  const auto grid = FrequencyGrid::uniform(-6, 6, 1201, 0.01);
  const auto fitted = green_frequency(f, grid);
  const oracle::Params op{4, 2, 0, 1};
  const auto particle = oracle::particle_poles(op);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Complex ref = 0;
    for (const auto& q : particle) ref += q.weight * (1.0 / (grid.point(i) - q.omega) + 1.0 / (grid.point(i) + q.omega));
    EXPECT_LT(std::abs(fitted[i] - ref), 1e-6) << grid.omegas[i];
  }
}

TEST(GreenFrequency, PoleOnRealAxisThrows) {
  EXPECT_THROW(green_at({0.5, 1.0, 0, 1.0}, 1.0), SingularityError);
  EXPECT_NO_THROW(green_at({0.5, 1.0, 0, 1.0}, Complex(1.0, 0.01)));
}

TEST(Hybridization, Examples) {
  EXPECT_EQ(hybridization({4, 2, 0, 0}, 0.3), Complex(0.0));
  EXPECT_NEAR(std::abs(hybridization({0, 0, 0, 1}, 2.0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(hybridization({0, 0, 0.5, 1}, Complex(0.5, 0.01)) - Complex(0, -100)), 0.0, 1e-9);
  EXPECT_THROW(hybridization({0, 0, 0.5, 1}, 0.5), SingularityError);
}

TEST(NoninteractingGreen, Examples) {
  EXPECT_EQ(noninteracting_green_inverse({0, 0, 0, 0}, 1.7), Complex(1.7));
  EXPECT_NEAR(std::abs(noninteracting_green_inverse({0, 2, 0, 1}, 1.0) - 2.0), 0.0, 1e-15);
}

TEST(NoninteractingGreen, MatchesLehmannAtZeroInteraction) {
  const SiamParams p{0, 0, 0, 1.4};
  const PoleFit g = lehmann_green(p);
  for (double w : {-3.0, -0.5, 0.2, 0.9, 2.5}) {
    const Complex z(w, 0.05);
    EXPECT_LT(std::abs(1.0 / noninteracting_green_inverse(p, z) - green_at(g, z)), 1e-10);
  }
}

TEST(DysonSelfEnergy, VanishesWithoutInteraction) {
  const auto t = default_times();
  const PoleFit f = fit_two_cosine(t, sample_cosines({0.5, 1.0, 0, 0}, t), 4.0);
  const SelfEnergyEval se = dyson_self_energy(f, {0, 0, 0, 1}, FrequencyGrid::standard());
  for (const Complex& s : se.values) EXPECT_LT(std::abs(s), 1e-8);
}

TEST(DysonSelfEnergy, HartreeShiftAtZeroFrequency) {
  const SelfEnergyEval se = dyson_self_energy(lehmann_green(kU4), kU4, FrequencyGrid::standard());
  EXPECT_NEAR(se.values[800].real() - kU4.mu, 0.0, 1e-8);
}

TEST(DysonSelfEnergy, ReconstructsGreenFunction) {
  const PoleFit f = lehmann_green(kU4);
  const FrequencyGrid grid = FrequencyGrid::uniform(-7, 7, 281, 0.02);
  const SelfEnergyEval se = dyson_self_energy(f, kU4, grid);
  const auto g = green_frequency(f, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex z = grid.point(i);
    const Complex back = 1.0 / (z + kU4.mu - hybridization(kU4, z) - se.values[i]);
    EXPECT_LT(std::abs(back - g[i]), 1e-10);
  }
}

TEST(DysonSelfEnergy, MatchesExactTwoSiteSelfEnergy) {
  const FrequencyGrid grid = FrequencyGrid::uniform(-6, 6, 121, 0.0);
  const SelfEnergyEval se = dyson_self_energy(lehmann_green(kU4), kU4, grid, SingularPolicy::limit);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid.omegas[i];
    if (std::abs(std::abs(w) - 3.0) < 1e-6) {
      EXPECT_TRUE(std::isinf(se.values[i].real()));
      continue;
    }
    EXPECT_NEAR(se.values[i].real(), oracle::sigma_two_site(4, 1, w), 1e-8) << w;
  }
}

TEST(DysonSelfEnergy, SingularPolicyError) {
  const FrequencyGrid grid = FrequencyGrid::uniform(-6, 6, 121, 0.0);
  EXPECT_THROW(dyson_self_energy(lehmann_green(kU4), kU4, grid), SingularityError);
}

TEST(SelfEnergyPole, TrotterFitWithinTwoPercent) {
  const PoleFit f = fit_two_cosine(measure_green_series(kU4, {}, EvolutionMethod::xy, 24));
  EXPECT_LT(std::abs(self_energy_pole(f) - 3.0) / 3.0, 0.02);
  EXPECT_NEAR(self_energy_pole(lehmann_green(kU4)), 3.0, 1e-10);
}

TEST(QuasiparticleWeight, NonInteracting) {
  EXPECT_NEAR(quasiparticle_weight({0.5, 1.0, 0, 1.0}, {0, 0, 0, 1}), 1.0, 1e-9);
}

TEST(QuasiparticleWeight, AtomicLimitIsInsulating) {
  EXPECT_THROW(quasiparticle_weight(atomic_limit_green(8), {8, 4, 0, 0}), InsulatingBranchError);
  EXPECT_THROW(quasiparticle_weight(atomic_limit_green(8), {8, 4, 0, 1}), InsulatingBranchError);
}

TEST(QuasiparticleWeight, ExactFitMatchesOracle) {
  const PoleFit f = fit_two_cosine(measure_green_series(kU4, {}, EvolutionMethod::exact, 0));
  const double oracle_z = oracle::z_from_poles(oracle::particle_poles({4, 2, 0, 1}));
  EXPECT_NEAR(oracle_z, kZU4V1, 1e-12);
  EXPECT_NEAR(quasiparticle_weight(f, kU4), kZU4V1, 1e-4);
}

TEST(QuasiparticleWeight, StepSizeRobust) {
  for (double u : {1.0, 3.0, 5.0}) {
    const SiamParams p = SiamParams::half_filled(u, 0.8);
    const PoleFit f = lehmann_green(p);
    EXPECT_NEAR(quasiparticle_weight(f, p, 1e-3), quasiparticle_weight(f, p, 5e-4), 1e-6);
    const double z = quasiparticle_weight(f, p);
    EXPECT_GE(z, 0.0);
    EXPECT_LE(z, 1.0);
  }
}

TEST(QuasiparticleWeight, RequiresSymmetricBath) {
  EXPECT_THROW(quasiparticle_weight(lehmann_green(kU4), {4, 2, 0.1, 1}), PreconditionError);
}

TEST(BetheDos, Examples) {
  EXPECT_NEAR(bethe_dos(0.0), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_EQ(bethe_dos(2.0), 0.0);
  EXPECT_EQ(bethe_dos(-2.0), 0.0);
  EXPECT_EQ(bethe_dos(3.0), 0.0);
  EXPECT_NEAR(bethe_dos(1.0, 0.5), 0.0, 1e-15);
}

TEST(BetheDos, NormalizationAndSecondMoment) {
  // Midpoint rule in eps = 2 t sin(theta), which removes the edge cusp.
  for (double t : {1.0, 0.7}) {
    const int n = 10000;
    double m0 = 0, m2 = 0;
    for (int k = 0; k < n; ++k) {
      const double th = -std::numbers::pi / 2 + std::numbers::pi * (k + 0.5) / n;
      const double eps = 2 * t * std::sin(th);
      const double w = bethe_dos(eps, t) * 2 * t * std::cos(th) * std::numbers::pi / n;
      m0 += w;
      m2 += eps * eps * w;
    }
    EXPECT_NEAR(m0, 1.0, 1e-6);
    EXPECT_NEAR(m2, t * t, 1e-6);
  }
}

TEST(SpectralFunction, BareSemicircle) {
  const SiamParams p{0, 0, 0, 1};
  const FrequencyGrid grid = FrequencyGrid::uniform(-3, 3, 61, 0.0);
  SelfEnergyEval se{grid.omegas, 0.0, std::vector<Complex>(grid.size(), 0.0), 1.0};
  const auto a = spectral_function(se, p, grid);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], oracle::semicircle(grid.omegas[i]), 1e-14);
}

TEST(SpectralFunction, InsulatorHasNoCentralPeak) {
  const SiamParams p{8, 4, 0, 0};
  const FrequencyGrid grid = FrequencyGrid::uniform(-8, 8, 1601, 0.0);
  const auto a = spectral_function(dyson_self_energy(atomic_limit_green(8), p, grid, SingularPolicy::limit), p);
  EXPECT_EQ(a[800], 0.0);
  for (double x : a) EXPECT_GE(x, 0.0);
  double hubbard = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(grid.omegas[i]) > 2) hubbard = std::max(hubbard, a[i]);
  EXPECT_GT(hubbard, 0.1);
}

TEST(SpectralFunction, MetalMatchesOraclePipeline) {
  const double u = 5.0;
  const auto [z, v] = oracle::two_site_dmft(u);
  const SiamParams p = SiamParams::half_filled(u, v);
  const PoleFit f = fit_two_cosine(measure_green_series(p, {}, EvolutionMethod::exact, 0));
  const FrequencyGrid grid = FrequencyGrid::uniform(-8, 8, 1601, 0.0);
  const auto a = spectral_function(dyson_self_energy(f, p, grid, SingularPolicy::limit), p);
  int features = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid.omegas[i];
    const double ref = oracle::semicircle(w + u / 2 - oracle::sigma_two_site(u, v, w));
    EXPECT_NEAR(a[i], ref, 0.02) << w;
    EXPECT_GE(a[i], 0.0);
    if (i > 0 && a[i] > 0 && a[i - 1] == 0) ++features;
  }
  EXPECT_NEAR(a[800], 1.0 / std::numbers::pi, 1e-6);  // pinned at the Fermi level
  EXPECT_EQ(features, 3);
  EXPECT_GT(z, 0.25);
}

TEST(SpectralFunction, RejectsGridMismatch) {
  SelfEnergyEval se{{0.0, 1.0}, 0.0, {0.0, 0.0}, std::nullopt};
  EXPECT_THROW(spectral_function(se, {0, 0, 0, 1}, FrequencyGrid::uniform(0, 2, 2, 0)), DomainError);
}

}  // namespace
}  // namespace qdmft

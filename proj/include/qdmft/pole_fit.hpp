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

#include <algorithm>
#include <cmath>
#include <utility>

#include "qdmft/errors.hpp"

namespace qdmft {

/// Residues and pole frequencies of the particle-hole symmetric four-pole
/// Green function
///   iG(tau) = 2 [alpha1 cos(omega1 tau) + alpha2 cos(omega2 tau)],
///   G(w)    = sum_j alpha_j [1/(w - omega_j) + 1/(w + omega_j)].
struct PoleFit {
  double alpha1 = 0.0;
  double omega1 = 0.0;
  double alpha2 = 0.0;
  double omega2 = 0.0;
  double rms_residual = 0.0;

  // Below this residue a pole frequency carries no information.
  static constexpr double kIdentifiableWeight = 1e-6;

  double weight_sum() const { return alpha1 + alpha2; }
  bool second_pole_identifiable() const { return alpha2 >= kIdentifiableWeight; }

  /// Canonical ordering: omega1 <= omega2, and when one residue is below
  /// kIdentifiableWeight the weighted pole goes first and the weightless one
  /// reports omega2 = max(its frequency, omega1).
  static PoleFit canonical(double a1, double w1, double a2, double w2, double rms = 0.0) {
    w1 = std::abs(w1);
    w2 = std::abs(w2);
    if (std::min(a1, a2) < kIdentifiableWeight) {
      if (a1 < a2) {
        std::swap(a1, a2);
        std::swap(w1, w2);
      }
      return {a1, w1, a2, std::max(w1, w2), rms};
    }
    if (w1 > w2) {
      std::swap(a1, a2);
      std::swap(w1, w2);
    }
    return {a1, w1, a2, w2, rms};
  }

  void validate() const {
    if (!(alpha1 >= 0.0 && alpha2 >= 0.0)) throw DomainError("pole residues must be nonnegative");
    if (!(omega1 >= 0.0 && omega2 >= omega1)) {
      throw DomainError("pole frequencies must satisfy 0 <= omega1 <= omega2");
    }
  }
};

}  // namespace qdmft

// Copyright 2026 The cavityfarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Moving-wall corrections to the adiabatic cavity Hamiltonian and a check of
// how large they are for a given length history.
//
// With Ldot = dL/dt the field Hamiltonian gains
//   - Ldot sum_{nm} alpha_nm omega_n pi_n phi_m
//   + 1/2 Ldot^2 sum_{nm} (sum_k alpha_nk alpha_mk omega_k) phi_n phi_m
//   + Ldot^2 / L sum_{nm} beta_nm phi_n phi_m.
// alpha and beta are used as dimensionless numbers, scaled by the driver's
// correction_scale(t).

#pragma once

#include <cstddef>
#include <optional>

#include "cavityfarm/cavity.hpp"
#include "cavityfarm/drivers.hpp"
#include "cavityfarm/gaussian.hpp"

namespace cavityfarm {

struct AlphaBetaMatrices {
  Matrix alpha;
  Matrix beta;
};

/// Closed forms, 1-based mode indices:
///   alpha_mn = -2 (-1)^{m+n} sqrt(mn) / (pi (m^2 - n^2)),  alpha_nn = 1/(2 pi n)
///   beta_mn  = 2 (-1)^{m+n} sqrt(mn) (m^2 + n^2) / (pi (m^2 - n^2)^2),
///   beta_nn  = n pi / 6 + 1/(4 pi n).
AlphaBetaMatrices alpha_beta(std::size_t n_modes);

/// Adiabatic F plus the moving-wall corrections.
HamiltonianMatrix assemble_F_full(const CavityConfig& config, double t_cycle, double t_global,
                                  const LengthDriver& driver, const AlphaBetaMatrices& mats);

/// Field-block correction terms alone, split by order in Ldot. Each is
/// 2N x 2N in the interleaved field quadratures.
struct CorrectionBlocks {
  Matrix first;   // O(Ldot)
  Matrix second;  // O(Ldot^2)
};
CorrectionBlocks correction_blocks(std::size_t n_modes, double t, const LengthDriver& driver,
                                   const AlphaBetaMatrices& mats);

struct SmallCase {
  std::size_t n_modes = 4;
  std::size_t cycles = 10;
  int steps_per_period = 100;
};

struct AuditReport {
  /// max over samples of max|first| / max|leading field block|.
  double ratio_1 = 0.0;
  /// Same for the Ldot^2 terms.
  double ratio_2 = 0.0;
  std::size_t samples = 0;
  /// max over cycles of max|detector_cov_full - detector_cov_adiabatic|.
  std::optional<double> observable_drift;
  /// max |corr_q1p2| of the adiabatic small-case run.
  std::optional<double> signal_scale;
};

/// Samples the correction ratios on [t0, t1]. With a small case, also runs
/// that truncation from its static fixed point for the given cycles, starting
/// at t0, once with and once without the corrections.
AuditReport audit(const CavityConfig& config, const LengthDriver& driver, double t0, double t1,
                  std::size_t samples = 1000,
                  const std::optional<SmallCase>& small_case = std::nullopt);

}  // namespace cavityfarm

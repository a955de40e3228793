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

// Repeated detector-pair cycles: fresh ground-state pair, interaction window
// of length T, free field evolution for delta_t. Stage one iterates at fixed
// L0 to the fixed point; stage two continues from it under a driver L(t)
// whose clock starts at the first perturbed cycle.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cavityfarm/cavity.hpp"
#include "cavityfarm/drivers.hpp"
#include "cavityfarm/errors.hpp"
#include "cavityfarm/gaussian.hpp"
#include "cavityfarm/integrator.hpp"

namespace cavityfarm {

struct CycleRecord {
  std::size_t cycle_index = 0;
  double t_start = 0.0;
  double t_end = 0.0;  // end of the interaction window
  Matrix4 detector_cov = Matrix4::Identity() * 0.5;
  double log_negativity = 0.0;
  double corr_q1p2 = 0.0;  // 2 <q1 p2>, symmetrised
  double symplectic_defect = 0.0;
};

struct CycleResult {
  GaussianState state;  // after the delay, ready for the next pair
  CycleRecord record;
};

struct FixedPointReport {
  bool converged = false;
  std::size_t cycles_used = 0;
  double residual = 0.0;
  /// Largest detector_cov entry still attributable to the initial field's
  /// deviation from vacuum.
  double memory = 0.0;
  GaussianState field_state = GaussianState::vacuum(2);
  CycleRecord record;
};

enum class FixedPointMethod {
  kDoubling,  // squares the affine field map; cycle counts 2^j cost j steps
  kIterate,   // applies the cycle map once per cycle
};

struct FixedPointOptions {
  double tolerance = 1e-9;
  std::size_t max_cycles = std::size_t{1} << 32;
  FixedPointMethod method = FixedPointMethod::kDoubling;
};

struct InitialFieldSpec {
  enum class Kind { kVacuum, kThermal, kSqueezed };
  Kind kind = Kind::kVacuum;
  double nbar = 0.0;
  double squeezing = 0.0;
  std::size_t mode = 1;  // 1-based field mode index

  static InitialFieldSpec vacuum() { return {}; }
  static InitialFieldSpec thermal(double nbar) { return {Kind::kThermal, nbar, 0.0, 1}; }
  static InitialFieldSpec squeezed(double r, std::size_t mode) {
    return {Kind::kSqueezed, 0.0, r, mode};
  }

  /// Detectors in vacuum, field as specified.
  GaussianState build(const CavityConfig& config) const;
};

/// Detector block reset to vacuum, detector-field correlations cleared.
GaussianState inject_fresh_pair(const GaussianState& state);

/// One cycle starting at global time t_start under an arbitrary driver.
CycleResult run_cycle(const GaussianState& state, const CavityConfig& config,
                      const LengthDriver& driver, double t_start,
                      const IntegratorConfig& integrator = {});

/// Cycle map at constant L0. Every cycle shares one propagator, so it is
/// integrated once and reused.
///
/// On the field block X the map is affine, X -> A X A^T + Q, and the recorded
/// detector block is S_dd S_dd^T / 2 + G X G^T before the readout rotation.
class StaticCycleMap {
 public:
  StaticCycleMap(const CavityConfig& config, const IntegratorConfig& integrator = {});
  CycleResult apply(const GaussianState& state, std::size_t cycle_index) const;
  const SymplecticPropagator& interaction() const { return interaction_; }
  const CavityConfig& config() const { return config_; }

  const Matrix& field_transfer() const { return transfer_; }  // A
  const Matrix& field_source() const { return source_; }      // Q
  const Matrix& readout_gain() const { return gain_; }        // G, 4 x 2N

 private:
  CavityConfig config_;
  SymplecticPropagator interaction_;
  std::vector<double> delay_phases_;
  Matrix transfer_, source_, gain_;
};

/// Runs cycles at L0 until converged or max_cycles is reached. Convergence is
/// tested at cycle counts c = 2 and c = 2^j + 2: the detector covariance must
/// differ by less than options.tolerance (max-abs) from both cycle c - 1 and
/// the previous checkpoint, and the memory of the initial field must also be
/// below tolerance. The larger of the two differences is the residual.
///
/// Near resonant delays the map contracts by only ~(lambda L0)^2 per cycle and
/// some off-resonant modes far more slowly, so the lag-1 difference alone
/// badly underestimates the distance to the fixed point.
FixedPointReport run_to_fixed_point(const InitialFieldSpec& initial, const CavityConfig& config,
                                    const FixedPointOptions& options = {},
                                    const IntegratorConfig& integrator = {});

using RecordSink = std::function<void(const CycleRecord&)>;

/// Continues from a converged fixed point for n_cycles cycles under driver.
void run_perturbed(const FixedPointReport& fixed_point, const CavityConfig& config,
                   const LengthDriver& driver, std::size_t n_cycles, const RecordSink& sink,
                   const IntegratorConfig& integrator = {},
                   const WarningSink& warn = stderr_warnings());

std::vector<CycleRecord> run_perturbed(const FixedPointReport& fixed_point,
                                       const CavityConfig& config, const LengthDriver& driver,
                                       std::size_t n_cycles,
                                       const IntegratorConfig& integrator = {},
                                       const WarningSink& warn = stderr_warnings());

/// Peak wall speed above which run_perturbed warns.
inline constexpr double kAdiabaticityWarning = 0.1;

}  // namespace cavityfarm

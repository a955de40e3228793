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

// Dirichlet cavity field truncated to n_modes modes, plus two harmonic
// detectors coupled through H_I = lambda chi(t) mu phi(x_d).
//
// Field modes use the normalisation phi(x) = sum_n sqrt(2/(n pi)) q_n sin(k_n x),
// which makes H_field = sum_n omega_n/2 (q_n^2 + p_n^2) and keeps the coupling
// coefficients independent of L while x/L is fixed.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cavityfarm/drivers.hpp"
#include "cavityfarm/gaussian.hpp"
#include "cavityfarm/integrator.hpp"

namespace cavityfarm {

enum class SwitchingKind { kSmooth, kSharp };

/// Frame used for the recorded detector covariance.
enum class ReadoutPicture {
  kInteraction,  // free detector rotation by Omega T removed
  kLab,
};

struct CavityConfig {
  double L0 = 1.0;
  std::size_t n_modes = 10;
  double lambda = 0.01;
  double omega_gap = 3.141592653589793;
  double T = 2.5;
  double delta = 0.5;
  double delta_t = 2.5;
  double r1 = 1.0 / 3.0;
  double r2 = 2.0 / 3.0;
  SwitchingKind switching = SwitchingKind::kSmooth;
  ReadoutPicture readout = ReadoutPicture::kInteraction;

  std::size_t oscillators() const { return n_modes + 2; }
  double cycle_period() const { return T + delta_t; }
  /// f = (T + delta_t) / L0.
  double f() const { return cycle_period() / L0; }

  /// Throws PreconditionError on violated invariants.
  void validate() const;
  /// Soft checks (interaction shorter than the light-crossing time).
  std::vector<std::string> warnings() const;

  /// Resonant reference setup: Omega = pi/L0, T = 2.5 L0, delta = 0.2 T,
  /// detectors at L0/3 and 2L0/3, delay chosen so that (T + delta_t)/L0 = f.
  static CavityConfig resonant(double L0, double lambda, double f, std::size_t n_modes = 10);
};

/// omega_n = k_n = n pi / L for n = 1..n_modes.
std::vector<double> mode_frequencies(std::size_t n_modes, double L);

/// Smooth compactly supported ramp with S(x) = [1 - tanh(cot x)]/2.
double switching(double t, double T, double delta);

/// chi(t) for the configured switching kind; sharp means 1 on [0, T].
double switching(const CavityConfig& config, double t_cycle);

/// Coefficient of q_d q_n in H for a detector at fraction r of the cavity:
/// lambda chi(t) (2 / sqrt(n pi)) sin(n pi r), n = 1..n_modes.
std::vector<double> coupling_row(const CavityConfig& config, double fraction, double t_cycle);

/// Full F(t) for a cycle started at t_global - t_cycle.
HamiltonianMatrix assemble_F(const CavityConfig& config, double t_cycle, double t_global,
                             const LengthDriver& driver);

/// Split generator of one interaction window. Time arguments are global;
/// the window starts at cycle_start.
class CavityGenerator : public SplitGenerator {
 public:
  CavityGenerator(const CavityConfig& config, const LengthDriver& driver, double cycle_start,
                  bool detectors_coupled = true);

  std::size_t oscillators() const override { return config_.oscillators(); }
  void rotation_increment(double ta, double tb, std::span<double> angles) const override;
  void frequencies(double t, std::span<double> omega) const override;
  void coupling(double t, Matrix& out) const override;
  void coupling_block(double t, Matrix& out) const override;
  double max_frequency(double t0, double t1) const override;
  std::size_t bipartite_split() const override { return 2; }

 private:
  const CavityConfig& config_;
  const LengthDriver& driver_;
  double cycle_start_;
  bool coupled_;
  std::vector<double> base1_, base2_;  // (2/sqrt(n pi)) sin(n pi r_i)
};

}  // namespace cavityfarm

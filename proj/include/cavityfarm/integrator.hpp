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

// Symplectic propagators for time-dependent quadratic Hamiltonians.
//
// The propagator obeys dS/dt = Omega F(t) S, S(t0) = I, and states evolve as
// sigma(t1) = S sigma(t0) S^T. Both entry points use classical fixed-step RK4.
// The step is h = (2 pi / omega_max) / steps_per_period, rounded so that an
// integer number of steps spans [t0, t1].

#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "cavityfarm/gaussian.hpp"

namespace cavityfarm {

struct IntegratorConfig {
  int steps_per_period = 100;
  /// Accepted max |S^T Omega S - Omega|; the step is halved while above it.
  double symplectic_tolerance = 1e-8;
  /// Number of step halvings tried before giving up. Exceeding
  /// 10 * symplectic_tolerance afterwards raises DiagnosticError.
  int max_refinements = 3;
  /// Also integrate at h/2 and record max |S_h - S_{h/2}| in audit_delta.
  bool doubling_audit = false;
};

/// Generator given as a full Hamiltonian matrix at each time.
using HamiltonianSupplier = std::function<HamiltonianMatrix(double)>;

/// Generator split into an exactly solvable part, a per-oscillator rotation
/// with frequency omega_i(t) (F block omega_i I2), plus everything else.
/// Only the remainder is integrated numerically, in the interaction picture.
class SplitGenerator {
 public:
  virtual ~SplitGenerator() = default;

  virtual std::size_t oscillators() const = 0;

  /// integral of omega_i over [ta, tb], one angle per oscillator.
  virtual void rotation_increment(double ta, double tb, std::span<double> angles) const = 0;

  /// Instantaneous omega_i(t).
  virtual void frequencies(double t, std::span<double> omega) const = 0;

  /// F(t) minus the rotation blocks. Must be symmetric; out is pre-sized.
  virtual void coupling(double t, Matrix& out) const = 0;

  /// Bound on the fastest frequency present on [t0, t1].
  virtual double max_frequency(double t0, double t1) const = 0;

  /// If p > 0 the coupling only links oscillators [0, p) with [p, n) and has
  /// no entries inside either group. Enables a block-sparse product.
  virtual std::size_t bipartite_split() const { return 0; }

  /// Upper-right 2p x 2(n - p) block of coupling(t) when bipartite_split() is
  /// p > 0; out is pre-sized. The default extracts it from coupling().
  virtual void coupling_block(double t, Matrix& out) const;

  /// Full F(t), for cross-checks against the lab-frame integrator.
  HamiltonianMatrix hamiltonian(double t) const;
};

/// Lab-frame RK4 for an arbitrary supplier. Throws IntegrationError on
/// non-finite F and DiagnosticError when the defect stays above tolerance.
SymplecticPropagator propagate(std::size_t oscillators, const HamiltonianSupplier& generator,
                               double t0, double t1, const IntegratorConfig& config = {});

/// Interaction-picture RK4 for a split generator.
SymplecticPropagator propagate(const SplitGenerator& generator, double t0, double t1,
                               const IntegratorConfig& config = {});

GaussianState evolve(const GaussianState& state, const HamiltonianSupplier& generator, double t0,
                     double t1, const IntegratorConfig& config = {});

GaussianState evolve(const GaussianState& state, const SplitGenerator& generator, double t0,
                     double t1, const IntegratorConfig& config = {});

/// Number of RK4 steps for an interval of given length and top frequency.
std::size_t step_count(double duration, double max_frequency, int steps_per_period);

}  // namespace cavityfarm

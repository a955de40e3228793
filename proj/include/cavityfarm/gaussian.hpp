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

// Zero-mean Gaussian states of coupled oscillators.
//
// Conventions: hbar = 1, q = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
// so the vacuum covariance is I/2. Quadratures are interleaved per oscillator,
// (q_0, p_0, q_1, p_1, ...). Oscillators 0 and 1 are the detectors whenever a
// state describes the cavity setup; the field modes follow.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace cavityfarm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix4 = Eigen::Matrix4d;

/// Tolerance on max |sigma - sigma^T| accepted for a covariance matrix.
inline constexpr double kSymmetryTolerance = 1e-12;
/// Slack below 1/2 tolerated on symplectic eigenvalues.
inline constexpr double kUncertaintySlack = 1e-9;

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
Matrix symplectic_form(std::size_t oscillators);

/// Max-abs asymmetry of a square matrix.
double asymmetry(const Matrix& m);

/// Quadratic Hamiltonian H = 1/2 x^T F x at time t.
struct HamiltonianMatrix {
  Matrix F;
  double t = 0.0;

  std::size_t oscillators() const { return static_cast<std::size_t>(F.rows() / 2); }
};

/// Linear phase-space map over [t0, t1].
struct SymplecticPropagator {
  Matrix S;
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t steps = 0;
  /// max |S - S_{h/2}| when the doubling audit is enabled, otherwise negative.
  double audit_delta = -1.0;

  /// max |S^T Omega S - Omega|.
  double defect() const;
};

class GaussianState {
 public:
  /// Takes ownership of a covariance; throws PreconditionError if it is not
  /// square with even dimension or is asymmetric beyond kSymmetryTolerance.
  explicit GaussianState(Matrix sigma);

  static GaussianState vacuum(std::size_t oscillators);
  /// Every oscillator thermal with mean occupation nbar: (nbar + 1/2) I.
  static GaussianState thermal(std::size_t oscillators, double nbar);

  std::size_t oscillators() const { return static_cast<std::size_t>(sigma_.rows() / 2); }
  const Matrix& covariance() const { return sigma_; }

  /// sigma -> S sigma S^T.
  GaussianState transformed(const Matrix& S) const;

  /// Smallest symplectic eigenvalue >= 1/2 - kUncertaintySlack.
  bool is_physical() const;

 private:
  Matrix sigma_;
};

/// Absolute values of the eigenvalues of i Omega sigma, one per pair, ascending.
/// Throws PreconditionError on asymmetric input.
std::vector<double> symplectic_eigenvalues(const Matrix& sigma);

/// Exact per-oscillator free rotation x -> R(theta_i) x with
/// R = [[cos, sin], [-sin, cos]], the flow of H = theta/2 (q^2 + p^2) for unit time.
GaussianState free_rotation(const GaussianState& state, std::span<const double> phases);

/// Leading 4x4 block (oscillators 0 and 1).
Matrix4 reduce_to_detectors(const GaussianState& state);

/// Logarithmic negativity (base 2) of a two-mode covariance.
double log_negativity(const Matrix4& block);

/// Rotate each of the two oscillators of a 4x4 block by its own angle.
Matrix4 rotate_pair(const Matrix4& block, double phase0, double phase1);

}  // namespace cavityfarm

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

#include "cavityfarm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cavityfarm/errors.hpp"

namespace cavityfarm {

WarningSink stderr_warnings() {
  return [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
}

WarningSink silent_warnings() {
  return [](const std::string&) {};
}

Matrix symplectic_form(std::size_t oscillators) {
  const auto n = static_cast<Eigen::Index>(2 * oscillators);
  Matrix omega = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    omega(i, i + 1) = 1.0;
    omega(i + 1, i) = -1.0;
  }
  return omega;
}

double asymmetry(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double SymplecticPropagator::defect() const {
  const Matrix omega = symplectic_form(static_cast<std::size_t>(S.rows() / 2));
  return (S.transpose() * omega * S - omega).cwiseAbs().maxCoeff();
}

GaussianState::GaussianState(Matrix sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() % 2 != 0 || sigma_.rows() == 0) {
    throw PreconditionError("covariance must be square with positive even dimension");
  }
  if (!sigma_.allFinite()) {
    throw PreconditionError("covariance has non-finite entries");
  }
  const double asym = asymmetry(sigma_);
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os << "covariance asymmetric by " << asym;
    throw PreconditionError(os.str());
  }
}

GaussianState GaussianState::vacuum(std::size_t oscillators) {
  return thermal(oscillators, 0.0);
}

GaussianState GaussianState::thermal(std::size_t oscillators, double nbar) {
  if (oscillators == 0) throw PreconditionError("state needs at least one oscillator");
  if (nbar < 0.0) throw PreconditionError("thermal occupation must be non-negative");
  const auto n = static_cast<Eigen::Index>(2 * oscillators);
  return GaussianState(Matrix::Identity(n, n) * (nbar + 0.5));
}

GaussianState GaussianState::transformed(const Matrix& S) const {
  Matrix out = S * sigma_ * S.transpose();
  // Round-off leaves ~1e-17 asymmetry; restore exact symmetry.
  out = 0.5 * (out + out.transpose()).eval();
  return GaussianState(std::move(out));
}

bool GaussianState::is_physical() const {
  const auto nu = symplectic_eigenvalues(sigma_);
  return nu.front() >= 0.5 - kUncertaintySlack;
}

std::vector<double> symplectic_eigenvalues(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0) {
    throw PreconditionError("symplectic_eigenvalues: need a square even-dimensional matrix");
  }
  if (asymmetry(sigma) > kSymmetryTolerance) {
    throw PreconditionError("symplectic_eigenvalues: input is not symmetric");
  }
  const auto oscillators = static_cast<std::size_t>(sigma.rows() / 2);
  std::vector<double> nu;
  nu.reserve(oscillators);
  const Eigen::SelfAdjointEigenSolver<Matrix> spectrum(sigma);
  if (spectrum.eigenvalues().minCoeff() > 0.0) {
    // K = sigma^1/2 Omega sigma^1/2 is antisymmetric with eigenvalues +-i nu,
    // so K^T K is symmetric with each nu^2 twice. Unlike the eigenvalues of
    // Omega sigma, these stay well conditioned when the nu are degenerate.
    const Matrix root = spectrum.operatorSqrt();
    const Matrix K = root * symplectic_form(oscillators) * root;
    const Eigen::SelfAdjointEigenSolver<Matrix> squares(K.transpose() * K,
                                                        Eigen::EigenvaluesOnly);
    const Vector& v = squares.eigenvalues();  // ascending
    for (Eigen::Index i = 0; i < v.size(); i += 2) {
      nu.push_back(std::sqrt(std::max(0.0, 0.5 * (v(i) + v(i + 1)))));
    }
    return nu;
  }
  // Not positive definite, so certainly unphysical; the general route still
  // reports how far.
  const Matrix omega_sigma = symplectic_form(oscillators) * sigma;
  Eigen::EigenSolver<Matrix> solver(omega_sigma, /*computeEigenvectors=*/false);
  std::vector<double> magnitudes;
  magnitudes.reserve(static_cast<std::size_t>(sigma.rows()));
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    magnitudes.push_back(std::abs(solver.eigenvalues()[i]));
  }
  std::sort(magnitudes.begin(), magnitudes.end());
  // Eigenvalues come in +-i nu pairs; keep one of each.
  for (std::size_t i = 0; i < magnitudes.size(); i += 2) {
    nu.push_back(0.5 * (magnitudes[i] + magnitudes[i + 1]));
  }
  return nu;
}

namespace {

inline void rotation_block(double phase, double& c, double& s) {
  c = std::cos(phase);
  s = std::sin(phase);
}

}  // namespace

GaussianState free_rotation(const GaussianState& state, std::span<const double> phases) {
  const std::size_t n = state.oscillators();
  if (phases.size() != n) {
    std::ostringstream os;
    os << "free_rotation: " << phases.size() << " phases for " << n << " oscillators";
    throw PreconditionError(os.str());
  }
  // R sigma R^T with R block diagonal: apply R to row pairs then to column pairs.
  Matrix sigma = state.covariance();
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) rotation_block(phases[i], c[i], s[i]);
  const Eigen::Index dim = sigma.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(2 * i);
    for (Eigen::Index col = 0; col < dim; ++col) {
      const double q = sigma(r, col);
      const double p = sigma(r + 1, col);
      sigma(r, col) = c[i] * q + s[i] * p;
      sigma(r + 1, col) = -s[i] * q + c[i] * p;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto k = static_cast<Eigen::Index>(2 * j);
    for (Eigen::Index row = 0; row < dim; ++row) {
      const double q = sigma(row, k);
      const double p = sigma(row, k + 1);
      sigma(row, k) = c[j] * q + s[j] * p;
      sigma(row, k + 1) = -s[j] * q + c[j] * p;
    }
  }
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return GaussianState(std::move(sigma));
}

Matrix4 reduce_to_detectors(const GaussianState& state) {
  if (state.oscillators() < 2) {
    throw PreconditionError("reduce_to_detectors: state has fewer than two oscillators");
  }
  return state.covariance().topLeftCorner<4, 4>();
}

Matrix4 rotate_pair(const Matrix4& block, double phase0, double phase1) {
  Matrix4 R = Matrix4::Zero();
  R(0, 0) = std::cos(phase0);
  R(0, 1) = std::sin(phase0);
  R(1, 0) = -R(0, 1);
  R(1, 1) = R(0, 0);
  R(2, 2) = std::cos(phase1);
  R(2, 3) = std::sin(phase1);
  R(3, 2) = -R(2, 3);
  R(3, 3) = R(2, 2);
  Matrix4 out = R * block * R.transpose();
  return 0.5 * (out + out.transpose());
}

double log_negativity(const Matrix4& block) {
  const auto nu = symplectic_eigenvalues(block);
  if (nu.front() < 0.5 - kUncertaintySlack) {
    std::ostringstream os;
    os << "log_negativity: not a valid covariance (smallest symplectic eigenvalue "
       << nu.front() << ")";
    throw PreconditionError(os.str());
  }
  // Invariant form of the partially transposed spectrum: nu_+^2 and nu_-^2
  // are the roots of x^2 - D x + det sigma. A negative discriminant means the
  // block is inconsistent. The value itself is taken from the eigenvalue
  // route below, which keeps full precision when the two roots coincide.
  const double D = block.topLeftCorner<2, 2>().determinant() +
                   block.bottomRightCorner<2, 2>().determinant() -
                   2.0 * block.topRightCorner<2, 2>().determinant();
  const double radicand = D * D - 4.0 * block.determinant();
  if (radicand < -1e-12 * std::max(1.0, D * D)) {
    std::ostringstream os;
    os << "log_negativity: negative radicand " << radicand;
    throw DiagnosticError(os.str());
  }
  // Partial transposition on the second detector flips the sign of p2.
  Matrix4 transposed = block;
  transposed.row(3) *= -1.0;
  transposed.col(3) *= -1.0;
  const double nu_minus = symplectic_eigenvalues(transposed).front();
  if (!(nu_minus > 0.0)) {
    throw DiagnosticError("log_negativity: non-positive partially transposed eigenvalue");
  }
  return std::max(0.0, -std::log2(2.0 * nu_minus));
}

}  // namespace cavityfarm

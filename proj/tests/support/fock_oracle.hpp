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

// Brute-force two-mode negativity in a truncated Fock space. Test oracle only.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace cavityfarm::testing {

// Two-mode squeezed vacuum exp(r (a b - a^dag b^dag)) |0,0> with each mode
// truncated to photon numbers 0..cutoff. Index n * (cutoff + 1) + m.
inline Eigen::VectorXd fock_two_mode_squeezed(double r, int cutoff) {
  const int d = cutoff + 1;
  const int dim = d * d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  // Kronecker products by hand: (X kron Y)(n d + m, n' d + m') = X(n, n') Y(m, m').
  auto kron = [d, dim](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    Eigen::MatrixXd out(dim, dim);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) out.block(i * d, j * d, d, d) = x(i, j) * y;
    }
    return out;
  };
  const Eigen::MatrixXd ab = kron(a, id) * kron(id, a);
  const Eigen::MatrixXd K = r * (ab - ab.transpose());
  const Eigen::MatrixXd U = K.exp();
  Eigen::VectorXd vac = Eigen::VectorXd::Zero(dim);
  vac(0) = 1.0;
  return U * vac;
}

// log2 of the trace norm of the partial transpose of |psi><psi|.
inline double fock_log_negativity(const Eigen::VectorXd& psi, int cutoff) {
  const int d = cutoff + 1;
  const int dim = d * d;
  Eigen::MatrixXd pt(dim, dim);
  // rho(n m, n' m') = psi(n m) psi(n' m'); transpose on the second mode swaps m and m'.
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      for (int n2 = 0; n2 < d; ++n2) {
        for (int m2 = 0; m2 < d; ++m2) {
          pt(n * d + m, n2 * d + m2) = psi(n * d + m2) * psi(n2 * d + m);
        }
      }
    }
  }
  const double norm = psi.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pt / norm, Eigen::EigenvaluesOnly);
  return std::log2(es.eigenvalues().cwiseAbs().sum());
}

}  // namespace cavityfarm::testing

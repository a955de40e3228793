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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "cavityfarm/errors.hpp"
#include "cavityfarm/gaussian.hpp"
#include "cavityfarm/integrator.hpp"
#include "support/fock_oracle.hpp"

using namespace cavityfarm;

namespace {

constexpr double kPi = std::numbers::pi;

// Lab-frame RK4 fine enough that phase error sits well below the checks.
IntegratorConfig fine_steps() {
  IntegratorConfig c;
  c.steps_per_period = 400;
  return c;
}

Matrix4 two_mode_squeezed(double r) {
  const double c = 0.5 * std::cosh(2 * r);
  const double s = 0.5 * std::sinh(2 * r);
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = c;
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return m;
}

Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  }
  return m;
}

// exp(Omega H) is symplectic for any symmetric H.
Matrix random_symplectic(std::mt19937_64& rng, std::size_t oscillators, double scale) {
  const auto n = static_cast<Eigen::Index>(2 * oscillators);
  return (symplectic_form(oscillators) * random_symmetric(rng, n, scale)).exp();
}

double defect(const Matrix& S) {
  const Matrix om = symplectic_form(static_cast<std::size_t>(S.rows() / 2));
  return (S.transpose() * om * S - om).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("symplectic form squares to minus identity") {
  const Matrix om = symplectic_form(3);
  CHECK((om.transpose() + om).cwiseAbs().maxCoeff() == 0.0);
  CHECK((om * om + Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state construction rejects malformed covariances") {
  CHECK_THROWS_AS(GaussianState(Matrix::Identity(3, 3)), PreconditionError);
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  m(0, 1) = 1e-6;
  CHECK_THROWS_AS(GaussianState{m}, PreconditionError);
}

TEST_CASE("symplectic eigenvalues of vacuum, thermal and pure states") {
  for (double nu : symplectic_eigenvalues(GaussianState::vacuum(3).covariance())) {
    CHECK(nu == doctest::Approx(0.5).epsilon(1e-14));
  }
  for (double nu : symplectic_eigenvalues(GaussianState::thermal(3, 1.5).covariance())) {
    CHECK(nu == doctest::Approx(2.0).epsilon(1e-14));
  }
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix S = random_symplectic(rng, 3, 0.4);
    const GaussianState pure = GaussianState::vacuum(3).transformed(S);
    for (double nu : symplectic_eigenvalues(pure.covariance())) CHECK(std::abs(nu - 0.5) < 1e-9);
    CHECK(pure.is_physical());
  }
  Matrix asym = Matrix::Identity(4, 4);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(symplectic_eigenvalues(asym), PreconditionError);
}

TEST_CASE("log negativity of standard two-mode states") {
  CHECK(log_negativity(Matrix4::Identity() * 0.5) == 0.0);
  for (double r : {0.05, 0.2, 0.5, 1.0}) {
    CHECK(log_negativity(two_mode_squeezed(r)) ==
          doctest::Approx(2 * r * std::numbers::log2e).epsilon(1e-12));
  }
  Matrix4 product = Matrix4::Zero();
  product(0, 0) = 0.5 * std::exp(-0.6);
  product(1, 1) = 0.5 * std::exp(0.6);
  product(2, 2) = 0.5 * std::exp(0.3);
  product(3, 3) = 0.5 * std::exp(-0.3);
  CHECK(log_negativity(product) < 1e-14);
  Matrix4 bad = Matrix4::Identity() * 0.1;
  CHECK_THROWS_AS(log_negativity(bad), PreconditionError);
}

TEST_CASE("log negativity agrees with the two-mode invariant formula") {
  // nu_-^2 = (D - sqrt(D^2 - 4 det sigma)) / 2 with D = det A + det B - 2 det C.
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double nbar = 0.05 * (trial % 5);
    const Matrix4 block =
        GaussianState::thermal(2, nbar).transformed(random_symplectic(rng, 2, 0.6)).covariance();
    const double D = block.topLeftCorner<2, 2>().determinant() +
                     block.bottomRightCorner<2, 2>().determinant() -
                     2 * block.topRightCorner<2, 2>().determinant();
    const double nu = std::sqrt(0.5 * (D - std::sqrt(D * D - 4 * block.determinant())));
    const double expected = std::max(0.0, -std::log2(2 * nu));
    CHECK(std::abs(log_negativity(block) - expected) < 1e-9);
  }
}

TEST_CASE("log negativity matches a truncated Fock-space partial transpose") {
  constexpr int kCutoff = 20;
  for (double r : {0.1, 0.3, 0.5}) {
    const double oracle =
        testing::fock_log_negativity(testing::fock_two_mode_squeezed(r, kCutoff), kCutoff);
    CHECK(std::abs(log_negativity(two_mode_squeezed(r)) - oracle) < 1e-6);
  }
}

TEST_CASE("log negativity is invariant under local rotations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix S = random_symplectic(rng, 2, 0.5);
    const Matrix4 block = GaussianState::vacuum(2).transformed(S).covariance();
    const double e = log_negativity(block);
    const Matrix4 rotated = rotate_pair(block, angle(rng), angle(rng));
    CHECK(std::abs(log_negativity(rotated) - e) < 1e-10);
  }
}

TEST_CASE("free rotation") {
  std::mt19937_64 rng(3);
  const GaussianState s = GaussianState::vacuum(2).transformed(random_symplectic(rng, 2, 0.5));
  const std::vector<double> zero(2, 0.0), full(2, 2 * kPi);
  CHECK((free_rotation(s, zero).covariance() - s.covariance()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((free_rotation(s, full).covariance() - s.covariance()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(free_rotation(s, std::vector<double>(3, 0.0)), PreconditionError);

  // Same map as integrating a diagonal F for the same time.
  const double w0 = 1.3, w1 = 0.7, dt = 2.1;
  HamiltonianMatrix H{Matrix::Zero(4, 4), 0.0};
  H.F.diagonal() << w0, w0, w1, w1;
  const GaussianState integrated = evolve(s, [&](double) { return H; }, 0.0, dt, fine_steps());
  const std::vector<double> phases = {w0 * dt, w1 * dt};
  CHECK((free_rotation(s, phases).covariance() - integrated.covariance()).cwiseAbs().maxCoeff() <
        1e-8);
  CHECK(std::abs(free_rotation(s, phases).covariance().determinant() /
                     s.covariance().determinant() -
                 1.0) < 1e-12);
}

TEST_CASE("reduce_to_detectors") {
  CHECK((reduce_to_detectors(GaussianState::vacuum(4)) - Matrix4::Identity() * 0.5)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianState s = GaussianState::vacuum(4).transformed(random_symplectic(rng, 4, 0.3));
    const auto nu = symplectic_eigenvalues(reduce_to_detectors(s));
    CHECK(nu.front() >= 0.5 - kUncertaintySlack);
  }
  CHECK_THROWS_AS(reduce_to_detectors(GaussianState::vacuum(1)), PreconditionError);
}

TEST_CASE("evolve: trivial generators") {
  std::mt19937_64 rng(9);
  const GaussianState s = GaussianState::vacuum(2).transformed(random_symplectic(rng, 2, 0.5));
  const GaussianState same =
      evolve(s, [](double t) { return HamiltonianMatrix{Matrix::Zero(4, 4), t}; }, 0.0, 1.0);
  CHECK((same.covariance() - s.covariance()).cwiseAbs().maxCoeff() == 0.0);

  const double w = 1.7;
  const GaussianState one = GaussianState::vacuum(1).transformed(random_symplectic(rng, 1, 0.5));
  const GaussianState back = evolve(
      one, [w](double t) { return HamiltonianMatrix{Matrix::Identity(2, 2) * w, t}; }, 0.0,
      2 * kPi / w, fine_steps());
  CHECK((back.covariance() - one.covariance()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("evolve agrees with the matrix exponential for constant F") {
  HamiltonianMatrix H{Matrix::Zero(4, 4), 0.0};
  H.F.diagonal() << 1.0, 1.0, 1.4, 1.4;
  H.F(0, 2) = H.F(2, 0) = 0.3;  // q-q coupling
  const double t1 = 3.0;
  const Matrix oracle = (symplectic_form(2) * H.F * t1).exp();
  const SymplecticPropagator P = propagate(2, [&](double) { return H; }, 0.0, t1, fine_steps());
  CHECK((P.S - oracle).cwiseAbs().maxCoeff() < 1e-8);

  std::mt19937_64 rng(13);
  const GaussianState s = GaussianState::thermal(2, 0.3).transformed(random_symplectic(rng, 2, 0.4));
  const GaussianState a = evolve(s, [&](double) { return H; }, 0.0, t1, fine_steps());
  const GaussianState b = s.transformed(oracle);
  CHECK((a.covariance() - b.covariance()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("property: evolution preserves det sigma and the uncertainty bound") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix F0 = random_symmetric(rng, 6, 0.3) + Matrix::Identity(6, 6) * 2.0;
    const Matrix F1 = random_symmetric(rng, 6, 0.3);
    const double w = 1.0 + u(rng) * 0.5;
    auto gen = [&](double t) { return HamiltonianMatrix{F0 + std::sin(w * t) * F1, t}; };
    const GaussianState s0 = GaussianState::thermal(3, 0.2).transformed(random_symplectic(rng, 3, 0.3));
    const SymplecticPropagator P = propagate(3, gen, 0.0, 4.0, fine_steps());
    CHECK(P.defect() <= 1e-8);
    const GaussianState s1 = s0.transformed(P.S);
    const double rel = s1.covariance().determinant() / s0.covariance().determinant() - 1.0;
    CHECK(std::abs(rel) < 1e-8);
    CHECK(symplectic_eigenvalues(s1.covariance()).front() >= 0.5 - kUncertaintySlack);
  }
}

TEST_CASE("property: halving the step shrinks the symplectic defect at fourth order") {
  HamiltonianMatrix H{Matrix::Zero(4, 4), 0.0};
  H.F.diagonal() << 1.0, 1.0, 1.5, 1.5;
  H.F(0, 2) = H.F(2, 0) = 0.4;
  H.F(1, 3) = H.F(3, 1) = -0.2;
  auto gen = [&](double t) {
    HamiltonianMatrix h = H;
    h.F(0, 2) = h.F(2, 0) = 0.4 * std::cos(0.3 * t);
    return h;
  };
  IntegratorConfig coarse;
  coarse.steps_per_period = 8;
  coarse.symplectic_tolerance = 1.0;  // no automatic refinement
  IntegratorConfig fine = coarse;
  fine.steps_per_period = 16;
  const double d1 = propagate(2, gen, 0.0, 10.0, coarse).defect();
  const double d2 = propagate(2, gen, 0.0, 10.0, fine).defect();
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 >= 8.0);
  CHECK(defect(propagate(2, gen, 0.0, 10.0).S) <= 1e-8);
}

TEST_CASE("evolve rejects bad intervals and non-finite generators") {
  const GaussianState s = GaussianState::vacuum(1);
  CHECK_THROWS_AS(evolve(s, [](double t) { return HamiltonianMatrix{Matrix::Identity(2, 2), t}; },
                         1.0, 0.0),
                  PreconditionError);
  CHECK_THROWS_AS(evolve(s,
                         [](double t) {
                           HamiltonianMatrix h{Matrix::Identity(2, 2), t};
                           h.F(0, 0) = std::nan("");
                           return h;
                         },
                         0.0, 1.0),
                  IntegrationError);
}

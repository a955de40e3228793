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

#include "cavityfarm/cavity.hpp"
#include "cavityfarm/drivers.hpp"
#include "cavityfarm/errors.hpp"
#include "cavityfarm/farming.hpp"

using namespace cavityfarm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("switching function values") {
  const double T = 2.5, delta = 0.5;
  CHECK(switching(T / 2, T, delta) == 1.0);
  CHECK(switching(delta / 2, T, delta) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(switching(T - delta / 2, T, delta) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(switching(1e-9, T, delta) == 0.0);
  CHECK(switching(0.0, T, delta) == 0.0);
  CHECK(switching(T, T, delta) == 0.0);
  CHECK(switching(-0.1, T, delta) == 0.0);
  CHECK(switching(T + 0.1, T, delta) == 0.0);
}

TEST_CASE("property: switching is continuous at the branch joins") {
  const double T = 2.5, delta = 0.5, eps = 1e-8;
  const double K = 10.0 / delta;
  for (double t : {0.0, delta, T - delta, T}) {
    for (double s : {-1.0, 1.0}) {
      const double a = switching(t, T, delta);
      const double b = switching(t + s * eps, T, delta);
      CHECK(std::abs(a - b) <= K * eps);
    }
  }
}

TEST_CASE("sharp switching option") {
  CavityConfig c = CavityConfig::resonant(1.0, 0.01, 4.5);
  c.switching = SwitchingKind::kSharp;
  CHECK(switching(c, 1e-9) == 1.0);
  CHECK(switching(c, c.T) == 1.0);
  CHECK(switching(c, c.T + 1e-9) == 0.0);
}

TEST_CASE("coupling row: closed form, node and switch-off") {
  CavityConfig c = CavityConfig::resonant(1.0, 0.01, 4.5);
  const double plateau = c.T / 2;
  const auto row = coupling_row(c, 1.0 / 3.0, plateau);
  CHECK(row[0] == doctest::Approx(0.009772).epsilon(1e-4));
  CHECK(row[0] == doctest::Approx(0.01 * 2 / std::sqrt(kPi) * std::sin(kPi / 3)).epsilon(1e-15));
  CHECK(std::abs(row[2]) < 1e-17);
  CHECK(std::abs(row[5]) < 1e-17);
  for (double v : coupling_row(c, 1.0 / 3.0, -1.0)) CHECK(v == 0.0);
}

TEST_CASE("property: couplings do not depend on the cavity length history") {
  const CavityConfig c = CavityConfig::resonant(1.0, 0.01, 4.5, 6);
  const StaticDriver fixed(c.L0);
  const SinusoidDriver moving(c.L0, 0.1, 2.0);
  for (double t : {0.3, 0.9, 1.25, 2.1}) {
    const Matrix a = assemble_F(c, t, t, fixed).F;
    const Matrix b = assemble_F(c, t, t, moving).F;
    CHECK(a.topRightCorner(4, a.cols() - 4) == b.topRightCorner(4, b.cols() - 4));
  }
}

TEST_CASE("property: mode frequencies satisfy omega_n L = n pi") {
  for (double L : {0.3, 1.0, 7.9, 123.0}) {
    const auto w = mode_frequencies(12, L);
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(w[i] * L == doctest::Approx(static_cast<double>(i + 1) * kPi).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(mode_frequencies(3, 0.0), ModelError);
}

TEST_CASE("assemble_F: hand-built two-mode case") {
  CavityConfig c = CavityConfig::resonant(2.0, 0.03, 4.5, 2);
  const StaticDriver driver(c.L0);
  const double t = c.T / 2;
  const Matrix F = assemble_F(c, t, t, driver).F;
  Matrix expected = Matrix::Zero(8, 8);
  const double W = kPi / 2.0;
  expected.diagonal() << W, W, W, W, kPi / 2.0, kPi / 2.0, kPi, kPi;
  auto g = [&](double r, int n) { return 0.03 * 2 / std::sqrt(n * kPi) * std::sin(n * kPi * r); };
  expected(0, 4) = expected(4, 0) = g(1.0 / 3.0, 1);
  expected(0, 6) = expected(6, 0) = g(1.0 / 3.0, 2);
  expected(2, 4) = expected(4, 2) = g(2.0 / 3.0, 1);
  expected(2, 6) = expected(6, 2) = g(2.0 / 3.0, 2);
  CHECK((F - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("property: assemble_F is symmetric") {
  const CavityConfig c = CavityConfig::resonant(1.0, 0.02, 4.7, 8);
  const SinusoidDriver driver(c.L0, 0.01, 1.0);
  for (int i = 0; i <= 50; ++i) {
    const double t = c.T * i / 50.0;
    const Matrix F = assemble_F(c, t, t + 3.0, driver).F;
    CHECK((F - F.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zero coupling leaves the detectors in vacuum") {
  CavityConfig c = CavityConfig::resonant(1.0, 0.0, 4.5, 4);
  const StaticDriver driver(c.L0);
  const HamiltonianMatrix H = assemble_F(c, 1.0, 1.0, driver);
  CHECK((H.F - Matrix(H.F.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  const CycleResult r = run_cycle(GaussianState::vacuum(c.oscillators()), c, driver, 0.0);
  CHECK((r.record.detector_cov - Matrix4::Identity() * 0.5).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r.record.log_negativity == 0.0);
  CHECK(r.record.corr_q1p2 == 0.0);
}

TEST_CASE("config validation and warnings") {
  CavityConfig c = CavityConfig::resonant(1.0, 0.01, 4.5);
  CHECK(c.f() == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(c.warnings().empty());
  CavityConfig bad = c;
  bad.delta = 0.6 * bad.T;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = c;
  bad.r1 = 0.7;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = c;
  bad.delta_t = -0.1;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  CavityConfig short_window = c;
  short_window.L0 = 100.0;
  CHECK(short_window.warnings().size() == 1);
}

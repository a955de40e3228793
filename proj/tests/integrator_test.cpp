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
#include "cavityfarm/integrator.hpp"

using namespace cavityfarm;

namespace {

constexpr double kPi = std::numbers::pi;

// Same generator with the block-sparse product disabled.
class DenseView final : public SplitGenerator {
 public:
  explicit DenseView(const SplitGenerator& g) : g_(g) {}
  std::size_t oscillators() const override { return g_.oscillators(); }
  void rotation_increment(double a, double b, std::span<double> out) const override {
    g_.rotation_increment(a, b, out);
  }
  void frequencies(double t, std::span<double> out) const override { g_.frequencies(t, out); }
  void coupling(double t, Matrix& out) const override { g_.coupling(t, out); }
  double max_frequency(double a, double b) const override { return g_.max_frequency(a, b); }

 private:
  const SplitGenerator& g_;
};

CavityConfig small_config() {
  CavityConfig c = CavityConfig::resonant(1.0, 0.05, 4.5, 4);
  return c;
}

}  // namespace

TEST_CASE("step_count") {
  CHECK(step_count(2 * kPi, 1.0, 100) == 100);
  CHECK(step_count(0.0, 1.0, 100) == 0);
  CHECK(step_count(1.0, 0.0, 100) == 1);
  CHECK(step_count(2 * kPi * 1.005, 1.0, 100) == 101);
  CHECK_THROWS_AS(step_count(1.0, 1.0, 0), PreconditionError);
}

TEST_CASE("interaction-picture propagator matches the lab-frame integrator") {
  const CavityConfig c = small_config();
  const SinusoidDriver driver(c.L0, 0.05 * c.L0, 0.3);
  const double t0 = 1.7;
  const CavityGenerator gen(c, driver, t0);
  const SymplecticPropagator split = propagate(gen, t0, t0 + c.T);
  IntegratorConfig fine;  // the lab frame needs many more steps for the same accuracy
  fine.steps_per_period = 2000;
  const SymplecticPropagator lab = propagate(
      c.oscillators(),
      [&](double t) { return assemble_F(c, t - t0, t, driver); }, t0, t0 + c.T, fine);
  CHECK(split.defect() <= 1e-8);
  CHECK(lab.defect() <= 1e-8);
  CHECK((split.S - lab.S).cwiseAbs().maxCoeff() < 1e-8);
  // The generator's full matrix is the lab-frame F.
  for (double t : {t0 + 0.1, t0 + 1.2, t0 + 2.4}) {
    CHECK((gen.hamiltonian(t).F - assemble_F(c, t - t0, t, driver).F).cwiseAbs().maxCoeff() <
          1e-15);
  }
}

TEST_CASE("block-sparse and dense interaction products agree") {
  const CavityConfig c = small_config();
  const StaticDriver driver(c.L0);
  const CavityGenerator gen(c, driver, 0.0);
  const DenseView dense(gen);
  const Matrix a = propagate(gen, 0.0, c.T).S;
  const Matrix b = propagate(dense, 0.0, c.T).S;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("uncoupled interval is an exact rotation") {
  const CavityConfig c = small_config();
  const StaticDriver driver(c.L0);
  const CavityGenerator gen(c, driver, 0.0, /*detectors_coupled=*/false);
  const SymplecticPropagator p = propagate(gen, 0.0, 1.3);
  std::vector<double> omega(c.oscillators());
  gen.frequencies(0.0, omega);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    const double th = omega[i] * 1.3;
    CHECK(p.S(k, k) == doctest::Approx(std::cos(th)).epsilon(1e-13));
    CHECK(p.S(k, k + 1) == doctest::Approx(std::sin(th)).epsilon(1e-13));
  }
}

TEST_CASE("doubling audit and step refinement") {
  const CavityConfig c = small_config();
  const StaticDriver driver(c.L0);
  const CavityGenerator gen(c, driver, 0.0);
  IntegratorConfig audit;
  audit.doubling_audit = true;
  const SymplecticPropagator p = propagate(gen, 0.0, c.T, audit);
  CHECK(p.audit_delta >= 0.0);
  CHECK(p.audit_delta < 1e-8);

  IntegratorConfig strict;
  strict.steps_per_period = 4;
  strict.symplectic_tolerance = 1e-30;
  strict.max_refinements = 0;
  CHECK_THROWS_AS(propagate(gen, 0.0, c.T, strict), DiagnosticError);
}

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
#include <string>
#include <vector>

#include "cavityfarm/cavity.hpp"
#include "cavityfarm/drivers.hpp"
#include "cavityfarm/errors.hpp"
#include "cavityfarm/farming.hpp"

using namespace cavityfarm;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Strongly coupled, few modes: contracts within a few hundred cycles.
CavityConfig fast_config(double f) { return CavityConfig::resonant(1.0, 0.3, f, 3); }

}  // namespace

TEST_CASE("inject_fresh_pair resets the detectors only") {
  const CavityConfig c = fast_config(4.5);
  const StaticCycleMap map(c);
  GaussianState s = GaussianState::thermal(c.oscillators(), 0.3);
  s = map.apply(s, 0).state;
  s = s.transformed(map.interaction().S);  // leave detector-field correlations
  const GaussianState fresh = inject_fresh_pair(s);
  const Matrix& in = s.covariance();
  const Matrix& out = fresh.covariance();
  CHECK(max_abs(out.topLeftCorner(4, 4) - Matrix::Identity(4, 4) * 0.5) == 0.0);
  CHECK(max_abs(out.topRightCorner(4, out.cols() - 4)) == 0.0);
  CHECK(max_abs(out.bottomLeftCorner(out.rows() - 4, 4)) == 0.0);
  CHECK(max_abs(out.bottomRightCorner(out.rows() - 4, out.cols() - 4) -
                in.bottomRightCorner(in.rows() - 4, in.cols() - 4)) == 0.0);
}

TEST_CASE("static cycle map agrees with a general run_cycle") {
  const CavityConfig c = fast_config(4.7);
  const StaticDriver driver(c.L0);
  const StaticCycleMap map(c);
  GaussianState a = GaussianState::vacuum(c.oscillators());
  GaussianState b = a;
  for (std::size_t k = 0; k < 4; ++k) {
    const double t = static_cast<double>(k) * (c.T + c.delta_t);
    const CycleResult ra = map.apply(a, k);
    const CycleResult rb = run_cycle(b, c, driver, t);
    CHECK(max_abs(ra.record.detector_cov - rb.record.detector_cov) < 1e-12);
    CHECK(ra.record.t_start == doctest::Approx(rb.record.t_start));
    CHECK(ra.record.t_end == doctest::Approx(t + c.T));
    a = ra.state;
    b = rb.state;
  }
}

TEST_CASE("one cycle is converged in the step size") {
  const CavityConfig c = CavityConfig::resonant(1.0, 0.01, 4.5, 10);
  const StaticDriver driver(c.L0);
  IntegratorConfig fine;
  fine.steps_per_period = 200;
  const GaussianState s = GaussianState::vacuum(c.oscillators());
  const CycleRecord a = run_cycle(s, c, driver, 0.0).record;
  const CycleRecord b = run_cycle(s, c, driver, 0.0, fine).record;
  CHECK(max_abs(a.detector_cov - b.detector_cov) < 1e-10);
  CHECK(a.symplectic_defect < 1e-10);
}

TEST_CASE("doubling and plain iteration reach the same fixed point") {
  for (double f : {4.5, 5.2}) {
    CAPTURE(f);
    const CavityConfig c = fast_config(f);
    FixedPointOptions iterate;
    iterate.method = FixedPointMethod::kIterate;
    iterate.max_cycles = 200000;
    const FixedPointReport a = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
    const FixedPointReport b = run_to_fixed_point(InitialFieldSpec::vacuum(), c, iterate);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.cycles_used == b.cycles_used);
    CHECK(max_abs(a.record.detector_cov - b.record.detector_cov) < 1e-12);
    CHECK(max_abs(a.field_state.covariance() - b.field_state.covariance()) < 1e-10);
  }
}

TEST_CASE("property: fixed point is idempotent under the cycle map") {
  for (double f : {4.5, 4.9, 5.6}) {
    CAPTURE(f);
    const CavityConfig c = fast_config(f);
    const FixedPointReport fp = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
    REQUIRE(fp.converged);
    // Convergence is judged on the detector readout. Field combinations the
    // detectors never see (a mode with a node at both detectors, for one)
    // may keep rotating, so only the readout is idempotent.
    const StaticCycleMap map(c);
    GaussianState state = fp.field_state;
    for (std::size_t k = 0; k < 5; ++k) {
      const CycleResult next = map.apply(state, fp.cycles_used + k);
      CHECK(max_abs(next.record.detector_cov - fp.record.detector_cov) < 1e-9);
      state = next.state;
    }
  }
}

TEST_CASE("property: fixed point does not depend on the initial field") {
  for (double f : {4.5, 5.2}) {
    CAPTURE(f);
    const CavityConfig c = fast_config(f);
    const FixedPointReport vac = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
    const FixedPointReport hot = run_to_fixed_point(InitialFieldSpec::thermal(0.2), c);
    const FixedPointReport sq = run_to_fixed_point(InitialFieldSpec::squeezed(0.3, 2), c);
    REQUIRE(hot.converged);
    REQUIRE(sq.converged);
    CHECK(max_abs(vac.record.detector_cov - hot.record.detector_cov) < 1e-8);
    CHECK(max_abs(vac.record.detector_cov - sq.record.detector_cov) < 1e-8);
    CHECK(std::abs(vac.record.log_negativity - hot.record.log_negativity) < 1e-7);
  }
}

TEST_CASE("zero coupling converges immediately") {
  const CavityConfig c = CavityConfig::resonant(1.0, 0.0, 4.5, 5);
  const FixedPointReport fp = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
  CHECK(fp.converged);
  CHECK(fp.cycles_used == 2);
  CHECK(fp.residual == 0.0);
  CHECK(fp.record.log_negativity == 0.0);
}

TEST_CASE("fixed point reports non-convergence when capped") {
  const CavityConfig c = CavityConfig::resonant(1.0, 0.01, 4.5, 10);
  FixedPointOptions capped;
  capped.max_cycles = 64;
  const FixedPointReport fp = run_to_fixed_point(InitialFieldSpec::vacuum(), c, capped);
  CHECK_FALSE(fp.converged);
  CHECK(fp.cycles_used <= 64);
  CHECK(fp.residual > 0.0);
}

TEST_CASE("frozen steady states at L0 = 1, lambda = 0.01, ten modes") {
  // Regression values, converged to 1e-9 in detector_cov.
  struct Row {
    double f, log_negativity, corr_q1p2;
  };
  for (const Row& row : {Row{4.5, 3.606849596906e-05, 1.978003358927e-09},
                         Row{4.4, 3.606755830428e-05, 2.976705857398e-09},
                         Row{5.0, 0.0, -4.151338477660e-06}}) {
    CAPTURE(row.f);
    const CavityConfig c = CavityConfig::resonant(1.0, 0.01, row.f, 10);
    const FixedPointReport fp = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
    REQUIRE(fp.converged);
    CHECK(fp.record.log_negativity == doctest::Approx(row.log_negativity).epsilon(1e-6));
    CHECK(fp.record.corr_q1p2 == doctest::Approx(row.corr_q1p2).epsilon(1e-4));
  }
}

TEST_CASE("property: scale invariance under L0 -> s L0, lambda -> lambda / s") {
  const CavityConfig a = CavityConfig::resonant(1.0, 0.3, 4.6, 3);
  const FixedPointReport fa = run_to_fixed_point(InitialFieldSpec::vacuum(), a);
  for (double s : {0.8, 8.0}) {
    CAPTURE(s);
    const CavityConfig b = CavityConfig::resonant(s, 0.3 / s, 4.6, 3);
    const FixedPointReport fb = run_to_fixed_point(InitialFieldSpec::vacuum(), b);
    CHECK(max_abs(fa.record.detector_cov - fb.record.detector_cov) < 1e-11);

    const SinusoidDriver da(a.L0, 0.01 * a.L0, 0.1);
    const SinusoidDriver db(b.L0, 0.01 * b.L0, 0.1 / s);
    const auto ra = run_perturbed(fa, a, da, 5, {}, silent_warnings());
    const auto rb = run_perturbed(fb, b, db, 5, {}, silent_warnings());
    for (std::size_t k = 0; k < ra.size(); ++k) {
      CHECK(rb[k].corr_q1p2 == doctest::Approx(ra[k].corr_q1p2).epsilon(1e-8));
      CHECK(rb[k].t_end == doctest::Approx(s * ra[k].t_end).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero-amplitude drive gives flat traces") {
  const CavityConfig c = fast_config(4.5);
  const FixedPointReport fp = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
  const SinusoidDriver still(c.L0, 0.0, 0.05);
  const auto records = run_perturbed(fp, c, still, 20, {}, silent_warnings());
  REQUIRE(records.size() == 20);
  for (const CycleRecord& r : records) {
    CHECK(std::abs(r.log_negativity - fp.record.log_negativity) < 1e-8);
    CHECK(std::abs(r.corr_q1p2 - fp.record.corr_q1p2) < 1e-8);
  }
  CHECK(records[3].cycle_index == 3);
  CHECK(records[3].t_start == doctest::Approx(3 * (c.T + c.delta_t)));
}

TEST_CASE("run_perturbed warns on fast walls and rejects unconverged input") {
  const CavityConfig c = fast_config(4.5);
  const FixedPointReport fp = run_to_fixed_point(InitialFieldSpec::vacuum(), c);
  std::vector<std::string> warnings;
  const SinusoidDriver fast(c.L0, 0.1, 2.0);
  run_perturbed(fp, c, fast, 1, {}, [&](const std::string& w) { warnings.push_back(w); });
  CHECK(warnings.size() >= 1);

  FixedPointReport stale = fp;
  stale.converged = false;
  CHECK_THROWS_AS(run_perturbed(stale, c, fast, 1, {}, silent_warnings()), PreconditionError);
}

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

#include "cavityfarm/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cavityfarm/errors.hpp"
#include "cavityfarm/farming.hpp"
#include "cavityfarm/integrator.hpp"

namespace cavityfarm {
namespace {

constexpr double kPi = std::numbers::pi;

double sign_power(std::size_t k) { return k % 2 == 0 ? 1.0 : -1.0; }

// Corrections written into the field block of F, which starts at offset.
void add_corrections(Matrix& F, Eigen::Index offset, std::size_t n_modes, double t,
                     const LengthDriver& driver, const AlphaBetaMatrices& mats, bool first,
                     bool second) {
  const LengthSample s = driver.sample(t);
  const double ldot = s.rate;
  if (ldot == 0.0) return;
  const double scale = driver.correction_scale(t);
  const auto omega = mode_frequencies(n_modes, s.length);
  const auto N = static_cast<Eigen::Index>(n_modes);
  if (first) {
    // -Ldot alpha_nm omega_n pi_n phi_m
    for (Eigen::Index n = 0; n < N; ++n) {
      for (Eigen::Index m = 0; m < N; ++m) {
        const double c = -ldot * scale * mats.alpha(n, m) * omega[n];
        const Eigen::Index p_n = offset + 2 * n + 1;
        const Eigen::Index q_m = offset + 2 * m;
        F(p_n, q_m) += c;
        F(q_m, p_n) += c;
      }
    }
  }
  if (second) {
    const Matrix a = mats.alpha * scale;
    Matrix w = Matrix::Zero(N, N);
    for (Eigen::Index k = 0; k < N; ++k) w(k, k) = omega[k];
    const Matrix m2 = a * w * a.transpose();
    const Matrix qq = ldot * ldot * m2 + (2.0 * ldot * ldot / s.length) * scale * mats.beta;
    for (Eigen::Index n = 0; n < N; ++n) {
      for (Eigen::Index m = 0; m < N; ++m) {
        F(offset + 2 * n, offset + 2 * m) += 0.5 * (qq(n, m) + qq(m, n));
      }
    }
  }
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Cavity generator with the moving-wall terms optionally added to the
// numerically integrated part.
class CorrectedGenerator final : public SplitGenerator {
 public:
  CorrectedGenerator(const CavityConfig& config, const LengthDriver& driver, double cycle_start,
                     bool coupled, const AlphaBetaMatrices* mats)
      : base_(config, driver, cycle_start, coupled),
        n_modes_(config.n_modes),
        driver_(driver),
        mats_(mats) {}

  std::size_t oscillators() const override { return base_.oscillators(); }
  void rotation_increment(double ta, double tb, std::span<double> angles) const override {
    base_.rotation_increment(ta, tb, angles);
  }
  void frequencies(double t, std::span<double> omega) const override {
    base_.frequencies(t, omega);
  }
  void coupling(double t, Matrix& out) const override {
    base_.coupling(t, out);
    if (mats_ != nullptr) add_corrections(out, 4, n_modes_, t, driver_, *mats_, true, true);
  }
  double max_frequency(double t0, double t1) const override {
    return base_.max_frequency(t0, t1);
  }

 private:
  CavityGenerator base_;
  std::size_t n_modes_;
  const LengthDriver& driver_;
  const AlphaBetaMatrices* mats_;
};

struct SmallRun {
  std::vector<Matrix4> detector_cov;
  double max_corr = 0.0;
};

SmallRun run_small(const CavityConfig& config, const LengthDriver& driver,
                   const GaussianState& start, double t0, std::size_t cycles,
                   const IntegratorConfig& integrator, const AlphaBetaMatrices* mats) {
  SmallRun out;
  GaussianState state = start;
  const double period = config.cycle_period();
  for (std::size_t k = 0; k < cycles; ++k) {
    const double ts = t0 + period * static_cast<double>(k);
    const double te = ts + config.T;
    const CorrectedGenerator window(config, driver, ts, true, mats);
    GaussianState exit = inject_fresh_pair(state).transformed(propagate(window, ts, te, integrator).S);
    Matrix4 block = reduce_to_detectors(exit);
    if (config.readout == ReadoutPicture::kInteraction) {
      const double phase = -config.omega_gap * config.T;
      block = rotate_pair(block, phase, phase);
    }
    out.detector_cov.push_back(block);
    out.max_corr = std::max(out.max_corr, std::abs(2.0 * block(0, 3)));
    if (config.delta_t > 0.0) {
      const CorrectedGenerator delay(config, driver, ts, false, mats);
      exit = exit.transformed(propagate(delay, te, te + config.delta_t, integrator).S);
    }
    state = std::move(exit);
  }
  return out;
}

}  // namespace

AlphaBetaMatrices alpha_beta(std::size_t n_modes) {
  if (n_modes < 1) throw PreconditionError("alpha_beta: need at least one mode");
  const auto N = static_cast<Eigen::Index>(n_modes);
  AlphaBetaMatrices mats{Matrix(N, N), Matrix(N, N)};
  for (Eigen::Index i = 0; i < N; ++i) {
    const double m = static_cast<double>(i + 1);
    for (Eigen::Index j = 0; j < N; ++j) {
      const double n = static_cast<double>(j + 1);
      if (i == j) {
        mats.alpha(i, j) = 1.0 / (2.0 * kPi * n);
        mats.beta(i, j) = n * kPi / 6.0 + 1.0 / (4.0 * kPi * n);
        continue;
      }
      const double sign = sign_power(static_cast<std::size_t>(i + j + 2));
      const double d = m * m - n * n;
      mats.alpha(i, j) = -2.0 * sign * std::sqrt(m * n) / (kPi * d);
      mats.beta(i, j) = 2.0 * sign * std::sqrt(m * n) * (m * m + n * n) / (kPi * d * d);
    }
  }
  return mats;
}

HamiltonianMatrix assemble_F_full(const CavityConfig& config, double t_cycle, double t_global,
                                  const LengthDriver& driver, const AlphaBetaMatrices& mats) {
  if (static_cast<std::size_t>(mats.alpha.rows()) != config.n_modes) {
    throw PreconditionError("assemble_F_full: matrix size does not match n_modes");
  }
  HamiltonianMatrix H = assemble_F(config, t_cycle, t_global, driver);
  add_corrections(H.F, 4, config.n_modes, t_global, driver, mats, true, true);
  return H;
}

CorrectionBlocks correction_blocks(std::size_t n_modes, double t, const LengthDriver& driver,
                                   const AlphaBetaMatrices& mats) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  CorrectionBlocks blocks{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
  add_corrections(blocks.first, 0, n_modes, t, driver, mats, true, false);
  add_corrections(blocks.second, 0, n_modes, t, driver, mats, false, true);
  return blocks;
}

AuditReport audit(const CavityConfig& config, const LengthDriver& driver, double t0, double t1,
                  std::size_t samples, const std::optional<SmallCase>& small_case) {
  config.validate();
  if (samples < 100) throw PreconditionError("audit: need at least 100 samples");
  if (!(t1 > t0)) throw PreconditionError("audit: empty time span");
  const AlphaBetaMatrices mats = alpha_beta(config.n_modes);
  AuditReport report;
  report.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const CorrectionBlocks c = correction_blocks(config.n_modes, t, driver, mats);
    // The leading field block is diagonal with largest entry omega_N.
    const double leading =
        static_cast<double>(config.n_modes) * kPi / driver.sample(t).length;
    report.ratio_1 = std::max(report.ratio_1, max_abs(c.first) / leading);
    report.ratio_2 = std::max(report.ratio_2, max_abs(c.second) / leading);
  }
  if (small_case) {
    CavityConfig small = config;
    small.n_modes = small_case->n_modes;
    small.validate();
    IntegratorConfig integrator;
    integrator.steps_per_period = small_case->steps_per_period;
    const FixedPointReport fp =
        run_to_fixed_point(InitialFieldSpec::vacuum(), small, {}, integrator);
    const AlphaBetaMatrices small_mats = alpha_beta(small.n_modes);
    const SmallRun plain =
        run_small(small, driver, fp.field_state, t0, small_case->cycles, integrator, nullptr);
    const SmallRun full =
        run_small(small, driver, fp.field_state, t0, small_case->cycles, integrator, &small_mats);
    double drift = 0.0;
    for (std::size_t k = 0; k < plain.detector_cov.size(); ++k) {
      drift = std::max(drift, (full.detector_cov[k] - plain.detector_cov[k]).cwiseAbs().maxCoeff());
    }
    report.observable_drift = drift;
    report.signal_scale = plain.max_corr;
  }
  return report;
}

}  // namespace cavityfarm

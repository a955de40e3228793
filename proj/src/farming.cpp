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

#include "cavityfarm/farming.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cavityfarm {
namespace {

CycleRecord make_record(const GaussianState& exit_state, const CavityConfig& config,
                        std::size_t index, double t_start, double defect) {
  CycleRecord rec;
  rec.cycle_index = index;
  rec.t_start = t_start;
  rec.t_end = t_start + config.T;
  Matrix4 block = reduce_to_detectors(exit_state);
  if (config.readout == ReadoutPicture::kInteraction) {
    const double phase = -config.omega_gap * config.T;
    block = rotate_pair(block, phase, phase);
  }
  rec.detector_cov = block;
  rec.log_negativity = log_negativity(block);
  rec.corr_q1p2 = 2.0 * block(0, 3);
  rec.symplectic_defect = defect;
  return rec;
}

std::vector<double> delay_phases(const CavityConfig& config, const LengthDriver& driver,
                                 double t0, double t1) {
  std::vector<double> phases(config.oscillators());
  phases[0] = config.omega_gap * (t1 - t0);
  phases[1] = phases[0];
  const double integral = driver.inverse_length_integral(t0, t1);
  for (std::size_t m = 0; m < config.n_modes; ++m) {
    phases[m + 2] = static_cast<double>(m + 1) * std::numbers::pi * integral;
  }
  return phases;
}

CycleResult finish_cycle(const GaussianState& injected, const SymplecticPropagator& interaction,
                         std::span<const double> delay, const CavityConfig& config,
                         std::size_t index, double t_start) {
  GaussianState exit_state = injected.transformed(interaction.S);
  CycleRecord rec = make_record(exit_state, config, index, t_start, interaction.defect());
  return {free_rotation(exit_state, delay), rec};
}

void check_dimension(const GaussianState& state, const CavityConfig& config) {
  if (state.oscillators() != config.oscillators()) {
    std::ostringstream os;
    os << "state has " << state.oscillators() << " oscillators, config expects "
       << config.oscillators();
    throw PreconditionError(os.str());
  }
}

}  // namespace

GaussianState InitialFieldSpec::build(const CavityConfig& config) const {
  const std::size_t n = config.oscillators();
  switch (kind) {
    case Kind::kVacuum:
      return GaussianState::vacuum(n);
    case Kind::kThermal: {
      if (nbar < 0.0) throw PreconditionError("thermal occupation must be non-negative");
      Matrix sigma = GaussianState::thermal(n, nbar).covariance();
      sigma.topLeftCorner(4, 4) = Matrix::Identity(4, 4) * 0.5;
      return GaussianState(std::move(sigma));
    }
    case Kind::kSqueezed: {
      if (mode < 1 || mode > config.n_modes) {
        throw PreconditionError("squeezed mode index out of range");
      }
      Matrix sigma = GaussianState::vacuum(n).covariance();
      const auto k = static_cast<Eigen::Index>(2 * (mode + 1));
      sigma(k, k) = 0.5 * std::exp(-2.0 * squeezing);
      sigma(k + 1, k + 1) = 0.5 * std::exp(2.0 * squeezing);
      return GaussianState(std::move(sigma));
    }
  }
  throw PreconditionError("unknown initial field kind");
}

GaussianState inject_fresh_pair(const GaussianState& state) {
  if (state.oscillators() < 2) throw PreconditionError("inject_fresh_pair: no detector slots");
  Matrix sigma = state.covariance();
  const Eigen::Index dim = sigma.rows();
  sigma.topLeftCorner(4, 4) = Matrix::Identity(4, 4) * 0.5;
  sigma.topRightCorner(4, dim - 4).setZero();
  sigma.bottomLeftCorner(dim - 4, 4).setZero();
  return GaussianState(std::move(sigma));
}

CycleResult run_cycle(const GaussianState& state, const CavityConfig& config,
                      const LengthDriver& driver, double t_start,
                      const IntegratorConfig& integrator) {
  config.validate();
  check_dimension(state, config);
  const GaussianState injected = inject_fresh_pair(state);
  const CavityGenerator generator(config, driver, t_start);
  const double t_exit = t_start + config.T;
  const SymplecticPropagator interaction = propagate(generator, t_start, t_exit, integrator);
  const auto delay = delay_phases(config, driver, t_exit, t_exit + config.delta_t);
  return finish_cycle(injected, interaction, delay, config, 0, t_start);
}

StaticCycleMap::StaticCycleMap(const CavityConfig& config, const IntegratorConfig& integrator)
    : config_(config) {
  config_.validate();
  const StaticDriver driver(config_.L0);
  const CavityGenerator generator(config_, driver, 0.0);
  interaction_ = propagate(generator, 0.0, config_.T, integrator);
  delay_phases_ = delay_phases(config_, driver, config_.T, config_.T + config_.delta_t);

  const Matrix& S = interaction_.S;
  const Eigen::Index m = S.rows() - 4;
  Matrix rotated = S.bottomRows(m);
  for (std::size_t i = 2; i < config_.oscillators(); ++i) {
    const auto r = static_cast<Eigen::Index>(2 * i) - 4;
    const double c = std::cos(delay_phases_[i]);
    const double s = std::sin(delay_phases_[i]);
    const Eigen::RowVectorXd q = rotated.row(r);
    const Eigen::RowVectorXd p = rotated.row(r + 1);
    rotated.row(r) = c * q + s * p;
    rotated.row(r + 1) = -s * q + c * p;
  }
  transfer_ = rotated.rightCols(m);
  source_ = 0.5 * rotated.leftCols(4) * rotated.leftCols(4).transpose();
  source_ = 0.5 * (source_ + source_.transpose()).eval();
  gain_ = S.topRightCorner(4, m);
}

CycleResult StaticCycleMap::apply(const GaussianState& state, std::size_t cycle_index) const {
  check_dimension(state, config_);
  const double t_start = config_.cycle_period() * static_cast<double>(cycle_index);
  return finish_cycle(inject_fresh_pair(state), interaction_, delay_phases_, config_, cycle_index,
                      t_start);
}

namespace {

GaussianState with_field(const Matrix& field) {
  const Eigen::Index dim = field.rows() + 4;
  Matrix sigma = Matrix::Zero(dim, dim);
  sigma.topLeftCorner(4, 4) = Matrix::Identity(4, 4) * 0.5;
  sigma.bottomRightCorner(field.rows(), field.rows()) = field;
  return GaussianState(std::move(sigma));
}

// Readout contribution of the initial field's excess over vacuum after the
// field has been carried through `power` = A^k.
double initial_memory(const StaticCycleMap& map, const Matrix& power, const Matrix& excess) {
  const Matrix carried = map.readout_gain() * power;
  Matrix4 block = carried * excess * carried.transpose();
  if (map.config().readout == ReadoutPicture::kInteraction) {
    const double phase = -map.config().omega_gap * map.config().T;
    block = rotate_pair(block, phase, phase);
  }
  return block.cwiseAbs().maxCoeff();
}

double max_abs_diff(const CycleRecord& a, const CycleRecord& b) {
  return (a.detector_cov - b.detector_cov).cwiseAbs().maxCoeff();
}

// Shared checkpoint bookkeeping. `last` and `before` are the records of cycles
// c and c - 1.
bool checkpoint(FixedPointReport& report, std::size_t c, const CycleResult& last,
                const CycleRecord& before, CycleRecord& previous_checkpoint, double memory,
                double tolerance) {
  report.cycles_used = c;
  report.residual = std::max(max_abs_diff(last.record, before),
                             max_abs_diff(last.record, previous_checkpoint));
  report.memory = memory;
  report.field_state = last.state;
  report.record = last.record;
  previous_checkpoint = last.record;
  report.converged = report.residual < tolerance && memory < tolerance;
  return report.converged;
}

FixedPointReport fixed_point_by_doubling(const StaticCycleMap& map, const GaussianState& initial,
                                         const FixedPointOptions& options) {
  const Eigen::Index m = map.field_transfer().rows();
  const Matrix x0 = initial.covariance().bottomRightCorner(m, m);
  const Matrix excess = x0 - Matrix::Identity(m, m) * 0.5;
  const Matrix& A = map.field_transfer();
  const Matrix& Q = map.field_source();

  FixedPointReport report;
  // Field after k cycles: A^k x0 A^kT + P_k, with P_k = sum_{i<k} A^i Q A^iT.
  Matrix power = Matrix::Identity(m, m);
  Matrix accumulated = Matrix::Zero(m, m);
  CycleRecord previous = map.apply(initial, 0).record;
  std::size_t k = 0;
  while (k + 2 <= options.max_cycles) {
    Matrix field = power * x0 * power.transpose() + accumulated;
    field = 0.5 * (field + field.transpose()).eval();
    const CycleResult first = map.apply(with_field(field), k);
    const CycleResult second = map.apply(first.state, k + 1);
    if (checkpoint(report, k + 2, second, first.record, previous,
                   initial_memory(map, power, excess), options.tolerance)) {
      break;
    }
    if (k == 0) {
      power = A;
      accumulated = Q;
      k = 1;
    } else {
      accumulated += power * accumulated * power.transpose();
      accumulated = 0.5 * (accumulated + accumulated.transpose()).eval();
      power = (power * power).eval();
      k *= 2;
    }
  }
  return report;
}

FixedPointReport fixed_point_by_iteration(const StaticCycleMap& map, const GaussianState& initial,
                                          const FixedPointOptions& options) {
  const Eigen::Index m = map.field_transfer().rows();
  const Matrix excess =
      initial.covariance().bottomRightCorner(m, m) - Matrix::Identity(m, m) * 0.5;
  FixedPointReport report;
  Matrix power = Matrix::Identity(m, m);  // A^(c-2) at cycle count c
  CycleResult step = map.apply(initial, 0);
  CycleRecord previous = step.record;
  std::size_t next_checkpoint = 2;
  for (std::size_t c = 2; c <= options.max_cycles; ++c) {
    CycleResult next = map.apply(step.state, c - 1);
    if (c > 2) power = (map.field_transfer() * power).eval();
    if (c == next_checkpoint) {
      if (checkpoint(report, c, next, step.record, previous, initial_memory(map, power, excess),
                     options.tolerance)) {
        break;
      }
      next_checkpoint = c == 2 ? 3 : 2 * (c - 2) + 2;
      if (next_checkpoint > options.max_cycles) break;
    }
    step = std::move(next);
  }
  return report;
}

}  // namespace

FixedPointReport run_to_fixed_point(const InitialFieldSpec& initial, const CavityConfig& config,
                                    const FixedPointOptions& options,
                                    const IntegratorConfig& integrator) {
  if (!(options.tolerance > 0.0)) throw PreconditionError("fixed point tolerance must be > 0");
  if (options.max_cycles < 2) throw PreconditionError("max_cycles must be >= 2");
  const StaticCycleMap map(config, integrator);
  const GaussianState start = initial.build(config);
  if (options.method == FixedPointMethod::kIterate) {
    return fixed_point_by_iteration(map, start, options);
  }
  return fixed_point_by_doubling(map, start, options);
}

void run_perturbed(const FixedPointReport& fixed_point, const CavityConfig& config,
                   const LengthDriver& driver, std::size_t n_cycles, const RecordSink& sink,
                   const IntegratorConfig& integrator, const WarningSink& warn) {
  if (!fixed_point.converged) throw PreconditionError("run_perturbed: fixed point not converged");
  if (n_cycles < 1) throw PreconditionError("run_perturbed: need at least one cycle");
  config.validate();
  const double period = config.cycle_period();
  const double span = period * static_cast<double>(n_cycles);
  const double speed = adiabaticity_figure(driver, 0.0, span);
  if (speed > kAdiabaticityWarning) {
    std::ostringstream os;
    os << "peak wall speed |dL/dt| = " << speed << " exceeds " << kAdiabaticityWarning
       << "; the adiabatic mode picture is unreliable";
    warn(os.str());
  }
  GaussianState state = fixed_point.field_state;
  for (std::size_t k = 0; k < n_cycles; ++k) {
    CycleResult result =
        run_cycle(state, config, driver, period * static_cast<double>(k), integrator);
    result.record.cycle_index = k;
    sink(result.record);
    state = std::move(result.state);
  }
}

std::vector<CycleRecord> run_perturbed(const FixedPointReport& fixed_point,
                                       const CavityConfig& config, const LengthDriver& driver,
                                       std::size_t n_cycles, const IntegratorConfig& integrator,
                                       const WarningSink& warn) {
  std::vector<CycleRecord> records;
  records.reserve(n_cycles);
  run_perturbed(
      fixed_point, config, driver, n_cycles,
      [&records](const CycleRecord& r) { records.push_back(r); }, integrator, warn);
  return records;
}

}  // namespace cavityfarm

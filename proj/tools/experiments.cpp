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

#include "experiments.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "cavityfarm/drivers.hpp"

namespace cavityfarm::cli {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::shared_ptr<const StrainWaveform> strain_of(const GwSpec& gw) {
  if (gw.waveform_csv) {
    const TwoColumnTable table = read_two_column_csv(*gw.waveform_csv);
    return std::make_shared<SampledStrain>(table.first, table.second);
  }
  return std::make_shared<SinusoidStrain>(gw.h0, gw.h_omega, gw.h_phase);
}

}  // namespace

ValleyPoint valley_point(const ScenarioConfig& cfg, double f) {
  CavityConfig c = cfg.cavity;
  c.delta_t = f * c.L0 - c.T;
  if (c.delta_t < 0.0 && c.delta_t > -1e-12 * c.L0) c.delta_t = 0.0;
  ValleyPoint p;
  p.f = f;
  p.report = run_to_fixed_point(cfg.initial, c, cfg.fixed_point, cfg.integrator);
  return p;
}

CsvRow valley_row(const ValleyPoint& p) {
  return {format_double(p.f), format_double(p.report.record.log_negativity),
          format_double(p.report.record.corr_q1p2), format_count(p.report.cycles_used)};
}

FixedPointReport steady_state(const ScenarioConfig& cfg) {
  FixedPointReport fp = run_to_fixed_point(cfg.initial, cfg.cavity, cfg.fixed_point, cfg.integrator);
  if (!fp.converged) {
    std::ostringstream os;
    os << "fixed point not converged after " << fp.cycles_used << " cycles (residual "
       << fp.residual << ", memory " << fp.memory << ")";
    throw ModelError(os.str());
  }
  return fp;
}

std::size_t cycles_for_periods(const CavityConfig& config, double gamma, double periods) {
  if (!(gamma > 0.0) || !(periods > 0.0)) {
    throw PreconditionError("cycles_for_periods: gamma and periods must be positive");
  }
  const double span = periods * kTwoPi / gamma;
  // Guard against 2999.9999999 style rounding of exact multiples.
  const double cycles = std::ceil(span / config.cycle_period() - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, cycles));
}

void vibration_series(const ScenarioConfig& cfg, const FixedPointReport& fp,
                      double amplitude_over_L0, double gamma_over_omega1, double periods,
                      const RecordSink& sink, const WarningSink& warn) {
  const double gamma = gamma_over_omega1 * cfg.omega1();
  const SinusoidDriver driver(cfg.cavity.L0, amplitude_over_L0 * cfg.cavity.L0, gamma);
  run_perturbed(fp, cfg.cavity, driver, cycles_for_periods(cfg.cavity, gamma, periods), sink,
                cfg.integrator, warn);
}

CsvRow vibration_row(const CycleRecord& r) {
  return {format_count(r.cycle_index), format_double(r.t_end), format_double(r.log_negativity),
          format_double(r.corr_q1p2)};
}

double freq_point(const ScenarioConfig& cfg, const FixedPointReport& fp, double amplitude_over_L0,
                  double gamma_over_omega1, double periods, const WarningSink& warn) {
  double peak = 0.0;
  vibration_series(
      cfg, fp, amplitude_over_L0, gamma_over_omega1, periods,
      [&peak](const CycleRecord& r) { peak = std::max(peak, std::abs(r.corr_q1p2)); }, warn);
  return peak;
}

void gw_series(const ScenarioConfig& cfg, const FixedPointReport& fp,
               const std::function<void(const GwRecord&)>& sink, const WarningSink& warn) {
  const GwSpec& gw = cfg.gw;
  auto strain = strain_of(gw);
  GwSpringParams params;
  params.L0 = cfg.cavity.L0;
  params.omega0 = gw.omega0;
  params.Q = gw.Q;
  params.dx0 = gw.dx0;
  params.dv0 = gw.dv0;
  params.steps_per_period = gw.steps_per_period;
  if (gw.sound_speed) {
    const double omega_gw =
        gw.waveform_csv ? kTwoPi / strain->shortest_period() : gw.h_omega;
    const double limit = *gw.sound_speed / cfg.cavity.L0;
    if (!(omega_gw < 0.1 * limit)) {
      std::ostringstream os;
      os << "strain frequency " << omega_gw << " is not small against v_s / L0 = " << limit
         << "; the instantaneous-spring model is unreliable";
      warn(os.str());
    }
  }
  std::size_t cycles = gw.cycles;
  if (cycles == 0) {
    if (gw.waveform_csv) {
      const TwoColumnTable table = read_two_column_csv(*gw.waveform_csv);
      cycles = static_cast<std::size_t>(
          std::max(1.0, std::floor(table.first.back() / cfg.cavity.cycle_period())));
    } else {
      cycles = cycles_for_periods(cfg.cavity, gw.h_omega, gw.periods);
    }
  }
  const GwSpringDriver driver(params, strain);
  run_perturbed(
      fp, cfg.cavity, driver, cycles,
      [&](const CycleRecord& r) {
        GwRecord g;
        g.record = r;
        g.length = driver.sample(r.t_end).length;
        g.displacement = driver.displacement(r.t_end).first;
        sink(g);
      },
      cfg.integrator, warn);
}

CsvRow gw_row(const GwRecord& r) {
  CsvRow row = vibration_row(r.record);
  row.push_back(format_double(r.length));
  row.push_back(format_double(r.displacement));
  return row;
}

AuditReport audit_point(const ScenarioConfig& cfg) {
  const AuditSpec& a = cfg.audit;
  const double gamma = a.gamma_over_omega1 * cfg.omega1();
  const SinusoidDriver driver(cfg.cavity.L0, a.amplitude_over_L0 * cfg.cavity.L0, gamma);
  std::optional<SmallCase> small;
  if (a.small_case) {
    small = SmallCase{a.small_modes, a.small_cycles, cfg.integrator.steps_per_period};
  }
  return audit(cfg.cavity, driver, 0.0, a.periods * kTwoPi / gamma, a.samples, small);
}

CsvTable audit_table(const ScenarioConfig& cfg, const AuditReport& report) {
  const double gamma_A =
      cfg.audit.gamma_over_omega1 * cfg.omega1() * cfg.audit.amplitude_over_L0 * cfg.cavity.L0;
  CsvTable t;
  t.header = kAuditHeader;
  t.rows.push_back({"ratio_1", format_double(report.ratio_1)});
  t.rows.push_back({"ratio_2", format_double(report.ratio_2)});
  t.rows.push_back({"gamma_A", format_double(gamma_A)});
  t.rows.push_back({"samples", format_count(report.samples)});
  if (report.observable_drift) {
    t.rows.push_back({"observable_drift", format_double(*report.observable_drift)});
    t.rows.push_back({"signal_scale", format_double(*report.signal_scale)});
  }
  return t;
}

}  // namespace cavityfarm::cli

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

// Single experiment points. Each is deterministic and independent of the
// others, so a sweep may evaluate them in any order or in parallel.

#pragma once

#include <functional>

#include "cavityfarm/audit.hpp"
#include "cavityfarm/errors.hpp"
#include "cavityfarm/farming.hpp"
#include "io.hpp"
#include "scenario.hpp"

namespace cavityfarm::cli {

inline const std::vector<std::string> kValleyHeader = {"f", "E_N_steady", "corr_q1p2_steady",
                                                       "cycles_to_converge"};
inline const std::vector<std::string> kVibrationHeader = {"cycle", "t", "E_N", "corr_q1p2"};
inline const std::vector<std::string> kFreqHeader = {"gamma", "max_abs_corr_q1p2"};
inline const std::vector<std::string> kGwHeader = {"cycle", "t", "E_N", "corr_q1p2", "L", "dx"};
inline const std::vector<std::string> kAuditHeader = {"quantity", "value"};

struct ValleyPoint {
  double f = 0.0;
  FixedPointReport report;
};

/// Fixed point of cfg.cavity with its delay set so that (T + delta_t) / L0 = f.
ValleyPoint valley_point(const ScenarioConfig& cfg, double f);
CsvRow valley_row(const ValleyPoint& p);

/// Fixed point of cfg.cavity from cfg.initial; throws ModelError if it did not
/// converge, since the driven stage is defined relative to it.
FixedPointReport steady_state(const ScenarioConfig& cfg);

/// Smallest cycle count whose span covers periods drive periods at gamma.
std::size_t cycles_for_periods(const CavityConfig& config, double gamma, double periods);

/// Driven cycles under L0 + A sin(gamma t). The clock starts at the first
/// driven cycle.
void vibration_series(const ScenarioConfig& cfg, const FixedPointReport& fp,
                      double amplitude_over_L0, double gamma_over_omega1, double periods,
                      const RecordSink& sink, const WarningSink& warn);
CsvRow vibration_row(const CycleRecord& r);

/// max |corr_q1p2| over the driven cycles.
double freq_point(const ScenarioConfig& cfg, const FixedPointReport& fp, double amplitude_over_L0,
                  double gamma_over_omega1, double periods, const WarningSink& warn);

struct GwRecord {
  CycleRecord record;
  double length = 0.0;
  double displacement = 0.0;
};
void gw_series(const ScenarioConfig& cfg, const FixedPointReport& fp,
               const std::function<void(const GwRecord&)>& sink, const WarningSink& warn);
CsvRow gw_row(const GwRecord& r);

/// Audit of the sinusoidal driver in cfg.audit over its configured span.
AuditReport audit_point(const ScenarioConfig& cfg);
CsvTable audit_table(const ScenarioConfig& cfg, const AuditReport& report);

}  // namespace cavityfarm::cli

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

// Declarative experiment configuration read from TOML.
//
// Keys suffixed _over_L0 are in units of the rest length L0, keys suffixed
// _over_omega1 in units of the fundamental frequency pi / L0. Everything else
// is in natural units (c = hbar = 1).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavityfarm/cavity.hpp"
#include "cavityfarm/farming.hpp"
#include "cavityfarm/integrator.hpp"

namespace cavityfarm::cli {

enum class Operation { kValleySweep, kVibration, kFreqResponse, kGw, kAudit };

std::string_view operation_name(Operation op);

struct GwSpec {
  double omega0 = 0.0;  // spring frequency sqrt(k/m); 0 means omega1
  double Q = 1000.0;
  double h0 = 0.0;
  double h_omega = 0.0;  // 0 means omega0
  double h_phase = 0.0;
  std::optional<std::filesystem::path> waveform_csv;  // (t, h) table
  double dx0 = 0.0;
  double dv0 = 0.0;
  int steps_per_period = 200;
  std::optional<double> sound_speed;  // enables the instantaneous-spring check
  double periods = 3.0;               // of the strain, when cycles is 0
  std::size_t cycles = 0;
};

struct AuditSpec {
  double amplitude_over_L0 = 1e-3;
  double gamma_over_omega1 = 4e-4;
  double periods = 1.0;
  std::size_t samples = 1000;
  bool small_case = true;
  std::size_t small_modes = 4;
  std::size_t small_cycles = 10;
};

struct ScenarioConfig {
  Operation operation = Operation::kValleySweep;
  CavityConfig cavity;
  InitialFieldSpec initial;
  IntegratorConfig integrator;
  FixedPointOptions fixed_point;

  std::vector<double> f_grid;              // valley-sweep
  std::vector<double> amplitudes_over_L0;  // vibration, freq-response (first entry)
  std::vector<double> gammas_over_omega1;  // vibration (first entry), freq-response
  double periods = 3.0;
  GwSpec gw;
  AuditSpec audit;

  std::uint64_t seed = 0;  // reserved; every run is deterministic
  std::optional<std::filesystem::path> output_dir;

  double omega1() const;
  /// Every resolved parameter, keys sorted.
  nlohmann::json resolved() const;
  /// SHA-256 (hex) of resolved().dump().
  std::string hash() const;
};

/// Parses TOML text. Relative paths resolve against base_dir. Throws
/// PreconditionError with the offending key on invalid input.
ScenarioConfig parse_config(std::string_view text, Operation op,
                            const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path, Operation op);

/// f in [lo, hi] with step, plus a finer step within halfwidth of each integer
/// in range. Sorted, duplicates removed.
std::vector<double> default_f_grid(double lo = 3.5, double hi = 6.5, double step = 0.01,
                                   double refine_step = 0.0005, double refine_halfwidth = 0.05);

/// SHA-256 of bytes as lowercase hex.
std::string sha256_hex(std::string_view bytes);

}  // namespace cavityfarm::cli

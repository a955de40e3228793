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

// Static SVG line plots of the experiment CSVs.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "io.hpp"

namespace cavityfarm::cli {

enum class PlotKind { kValley, kVibration, kFreq, kGw };

/// "valley", "vibration", "freq" or "gw".
PlotKind parse_plot_kind(std::string_view name);

/// Throws PreconditionError if the header does not match the kind's schema or
/// there are no rows.
std::string render_svg(const CsvTable& table, PlotKind kind);

/// Reads csv, renders, and only then writes out.
void plot_csv(const std::filesystem::path& csv, PlotKind kind, const std::filesystem::path& out);

}  // namespace cavityfarm::cli

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

// Runs an operation's points on a worker pool and keeps manifest.json in the
// output directory current after every finished point.
//
// Point statuses: "pending", "ok", "not_converged" (fixed point missed the
// tolerance; the row is still written), "failed" and "skipped" (never started
// because an earlier point failed without --keep-going). A resumed run reuses
// "ok" and "not_converged" points from a manifest with the same config hash.

#pragma once

#include <filesystem>
#include <string_view>

#include "scenario.hpp"

namespace cavityfarm::cli {

inline constexpr std::string_view kManifestName = "manifest.json";

struct RunOptions {
  std::filesystem::path out_dir;
  bool resume = false;
  unsigned workers = 1;
  bool keep_going = false;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPointFailed = 1;
inline constexpr int kExitUsage = 2;

/// Returns kExitOk, or kExitPointFailed if a point failed and keep_going is
/// off. Throws PreconditionError when resuming against a different config.
int run_operation(const ScenarioConfig& cfg, const RunOptions& options);

std::string_view code_version();

}  // namespace cavityfarm::cli

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

// cavityfarm: command-line driver for the detector-pair farming experiments.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "cavityfarm/errors.hpp"
#include "plot.hpp"
#include "runner.hpp"
#include "scenario.hpp"

namespace {

using namespace cavityfarm;
using namespace cavityfarm::cli;

struct CommonFlags {
  std::string config;
  std::string out;
  bool resume = false;
  unsigned workers = 1;
  bool keep_going = false;
};

CLI::App* add_run_command(CLI::App& app, const std::string& name, const std::string& help,
                          CommonFlags& flags) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", flags.config, "TOML scenario file")->required()->check(
      CLI::ExistingFile);
  sub->add_option("--out", flags.out, "Output directory (overrides output.dir)");
  sub->add_flag("--resume", flags.resume, "Skip points already completed in the manifest");
  sub->add_option("--workers", flags.workers, "Parallel workers")
      ->envname("CAVITYFARM_WORKERS")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--keep-going", flags.keep_going,
                "Record failed points and exit 0 instead of stopping");
  return sub;
}

int run(Operation op, const CommonFlags& flags) {
  const ScenarioConfig cfg = load_config(flags.config, op);
  RunOptions options;
  if (!flags.out.empty()) {
    options.out_dir = flags.out;
  } else if (cfg.output_dir) {
    options.out_dir = *cfg.output_dir;
  } else {
    throw PreconditionError("no output directory: pass --out or set output.dir");
  }
  options.resume = flags.resume;
  options.workers = flags.workers;
  options.keep_going = flags.keep_going;
  spdlog::info("{} -> {} (config {}, {} worker(s))", operation_name(op),
               options.out_dir.string(), cfg.hash().substr(0, 12), options.workers);
  return run_operation(cfg, options);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("cavityfarm"));
  spdlog::set_pattern("%H:%M:%S %^%l%$ %v");

  CLI::App app{"Detector-pair farming in a vibrating cavity"};
  app.set_version_flag("--version", std::string(code_version()));
  app.require_subcommand(1);

  CommonFlags flags;
  const std::pair<Operation, CLI::App*> commands[] = {
      {Operation::kValleySweep,
       add_run_command(app, "valley-sweep", "Steady-state E_N over a grid of f", flags)},
      {Operation::kVibration,
       add_run_command(app, "vibration", "Per-cycle response to a sinusoidal wall", flags)},
      {Operation::kFreqResponse,
       add_run_command(app, "freq-response", "Peak correlator over a grid of gamma", flags)},
      {Operation::kGw, add_run_command(app, "gw", "Response to a strain-driven spring", flags)},
      {Operation::kAudit,
       add_run_command(app, "audit", "Size of the moving-wall corrections", flags)},
  };

  std::string csv;
  std::string kind;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plot", "Render a result CSV as SVG");
  plot->add_option("--csv", csv, "Result CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind, "valley, vibration, freq or gw")->required();
  plot->add_option("--out", plot_out, "SVG path (default: CSV path with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (plot->parsed()) {
      std::filesystem::path out = plot_out;
      if (out.empty()) out = std::filesystem::path(csv).replace_extension(".svg");
      plot_csv(csv, parse_plot_kind(kind), out);
      spdlog::info("wrote {}", out.string());
      return kExitOk;
    }
    for (const auto& [op, sub] : commands) {
      if (sub->parsed()) return run(op, flags);
    }
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitPointFailed;
  }
  return kExitUsage;
}

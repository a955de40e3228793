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

#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "experiments.hpp"

#ifndef CAVITYFARM_VERSION
#define CAVITYFARM_VERSION "unknown"
#endif

namespace cavityfarm::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct PointResult {
  std::string status = "pending";
  std::string message;
  std::vector<CsvRow> rows;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  double wall_clock_s = 0.0;
};

struct Point {
  std::string id;
  json params;
  std::function<PointResult(const WarningSink&)> run;
};

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool terminal_success(const std::string& status) {
  return status == "ok" || status == "not_converged";
}

std::string final_csv_name(Operation op) {
  switch (op) {
    case Operation::kValleySweep:
      return "valley_sweep.csv";
    case Operation::kFreqResponse:
      return "freq_response.csv";
    default:
      return {};
  }
}

PointResult write_series(const fs::path& path, const std::vector<std::string>& header,
                         std::vector<CsvRow> rows) {
  CsvTable table{header, std::move(rows)};
  write_file_atomic(path, table.render());
  PointResult r;
  r.status = "ok";
  r.files.push_back(path.filename().string());
  return r;
}

std::vector<Point> build_points(const ScenarioConfig& cfg, const fs::path& out_dir) {
  std::vector<Point> points;
  switch (cfg.operation) {
    case Operation::kValleySweep:
      for (double f : cfg.f_grid) {
        points.push_back({"f=" + format_double(f), json{{"f", f}}, [&cfg, f](const WarningSink&) {
                            const ValleyPoint p = valley_point(cfg, f);
                            PointResult r;
                            r.rows.push_back(valley_row(p));
                            if (p.report.converged) {
                              r.status = "ok";
                            } else {
                              r.status = "not_converged";
                              std::ostringstream os;
                              os << "residual " << p.report.residual << ", memory "
                                 << p.report.memory << " after " << p.report.cycles_used
                                 << " cycles";
                              r.message = os.str();
                            }
                            return r;
                          }});
      }
      break;
    case Operation::kVibration:
      for (std::size_t i = 0; i < cfg.amplitudes_over_L0.size(); ++i) {
        const double a = cfg.amplitudes_over_L0[i];
        const fs::path file = out_dir / ("vibration_" + std::to_string(i) + ".csv");
        points.push_back(
            {"A=" + format_double(a),
             json{{"amplitude_over_L0", a},
                  {"gamma_over_omega1", cfg.gammas_over_omega1.front()},
                  {"periods", cfg.periods}},
             [&cfg, a, file](const WarningSink& warn) {
               const FixedPointReport fp = steady_state(cfg);
               std::vector<CsvRow> rows;
               vibration_series(
                   cfg, fp, a, cfg.gammas_over_omega1.front(), cfg.periods,
                   [&rows](const CycleRecord& rec) { rows.push_back(vibration_row(rec)); }, warn);
               return write_series(file, kVibrationHeader, std::move(rows));
             }});
      }
      break;
    case Operation::kFreqResponse:
      for (double g : cfg.gammas_over_omega1) {
        points.push_back({"gamma_over_omega1=" + format_double(g),
                          json{{"gamma_over_omega1", g},
                               {"amplitude_over_L0", cfg.amplitudes_over_L0.front()},
                               {"periods", cfg.periods}},
                          [&cfg, g](const WarningSink& warn) {
                            const FixedPointReport fp = steady_state(cfg);
                            const double peak = freq_point(
                                cfg, fp, cfg.amplitudes_over_L0.front(), g, cfg.periods, warn);
                            PointResult r;
                            r.status = "ok";
                            r.rows.push_back(
                                {format_double(g * cfg.omega1()), format_double(peak)});
                            return r;
                          }});
      }
      break;
    case Operation::kGw: {
      const fs::path file = out_dir / "gw.csv";
      points.push_back({"gw", json::object(), [&cfg, file](const WarningSink& warn) {
                          const FixedPointReport fp = steady_state(cfg);
                          std::vector<CsvRow> rows;
                          gw_series(
                              cfg, fp, [&rows](const GwRecord& g) { rows.push_back(gw_row(g)); },
                              warn);
                          return write_series(file, kGwHeader, std::move(rows));
                        }});
      break;
    }
    case Operation::kAudit: {
      const fs::path file = out_dir / "audit.csv";
      points.push_back({"audit", json::object(), [&cfg, file](const WarningSink&) {
                          const AuditReport report = audit_point(cfg);
                          const CsvTable table = audit_table(cfg, report);
                          return write_series(file, table.header, table.rows);
                        }});
      break;
    }
  }
  return points;
}

json point_json(const Point& p, const PointResult& r) {
  json j{{"id", p.id},
         {"params", p.params},
         {"status", r.status},
         {"wall_clock_s", r.wall_clock_s},
         {"files", r.files}};
  if (!r.message.empty()) j["message"] = r.message;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  if (!r.rows.empty()) j["rows"] = r.rows;
  return j;
}

// Results of a previous run with the same hash, keyed by point id.
std::map<std::string, PointResult> previous_results(const fs::path& manifest_path,
                                                    const std::string& hash,
                                                    const fs::path& out_dir) {
  std::map<std::string, PointResult> out;
  if (!fs::exists(manifest_path)) return out;
  json m;
  try {
    std::ifstream in(manifest_path);
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError("cannot resume: unreadable manifest (" + std::string(e.what()) + ")");
  }
  if (m.value("config_hash", "") != hash) {
    throw PreconditionError("cannot resume: manifest config hash differs from this config");
  }
  for (const json& p : m.at("points")) {
    PointResult r;
    r.status = p.value("status", "pending");
    if (!terminal_success(r.status)) continue;
    r.message = p.value("message", "");
    r.wall_clock_s = p.value("wall_clock_s", 0.0);
    r.files = p.value("files", std::vector<std::string>{});
    r.warnings = p.value("warnings", std::vector<std::string>{});
    r.rows = p.value("rows", std::vector<CsvRow>{});
    bool files_present = true;
    for (const auto& f : r.files) files_present = files_present && fs::exists(out_dir / f);
    if (files_present) out.emplace(p.at("id").get<std::string>(), std::move(r));
  }
  return out;
}

}  // namespace

std::string_view code_version() { return CAVITYFARM_VERSION; }

int run_operation(const ScenarioConfig& cfg, const RunOptions& options) {
  const fs::path out_dir = options.out_dir;
  fs::create_directories(out_dir);
  const fs::path manifest_path = out_dir / kManifestName;
  const std::string hash = cfg.hash();

  const std::vector<Point> points = build_points(cfg, out_dir);
  std::vector<PointResult> results(points.size());
  std::map<std::string, PointResult> previous;
  if (options.resume) previous = previous_results(manifest_path, hash, out_dir);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = previous.find(points[i].id);
    if (it != previous.end()) {
      results[i] = std::move(it->second);
    } else {
      todo.push_back(i);
    }
  }
  if (options.resume) {
    spdlog::info("resuming: {} of {} points already complete", points.size() - todo.size(),
                 points.size());
  }

  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  std::mutex mu;
  std::vector<std::string> outputs;
  const std::string final_name = final_csv_name(cfg.operation);
  if (!final_name.empty()) outputs.push_back(final_name);

  // Caller holds mu.
  auto write_manifest = [&](bool finished) {
    json m;
    m["operation"] = operation_name(cfg.operation);
    m["config_hash"] = hash;
    m["config"] = cfg.resolved();
    m["code_version"] = code_version();
    m["started_utc"] = started;
    m["finished"] = finished;
    m["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m["outputs"] = outputs;
    json pts = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) pts.push_back(point_json(points[i], results[i]));
    m["points"] = std::move(pts);
    write_file_atomic(manifest_path, m.dump(2) + "\n");
  };
  {
    std::lock_guard lock(mu);
    write_manifest(false);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::atomic<std::size_t> done{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const std::size_t i = todo[k];
      if (abort.load()) {
        std::lock_guard lock(mu);
        results[i].status = "skipped";
        continue;
      }
      std::vector<std::string> warnings;
      const WarningSink warn = [&warnings, &points, i](const std::string& msg) {
        spdlog::warn("{}: {}", points[i].id, msg);
        warnings.push_back(msg);
      };
      const auto start = std::chrono::steady_clock::now();
      PointResult r;
      try {
        r = points[i].run(warn);
      } catch (const std::exception& e) {
        r = PointResult{};
        r.status = "failed";
        r.message = e.what();
        if (!options.keep_going) abort.store(true);
      }
      r.warnings = std::move(warnings);
      r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::lock_guard lock(mu);
      const std::size_t n = ++done;
      if (r.status == "failed") {
        spdlog::error("[{}/{}] {} failed: {}", n, todo.size(), points[i].id, r.message);
      } else {
        spdlog::info("[{}/{}] {} {} ({:.2f} s)", n, todo.size(), points[i].id, r.status,
                     r.wall_clock_s);
      }
      results[i] = std::move(r);
      write_manifest(false);
    }
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(todo.size())));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  if (!final_name.empty()) {
    CsvTable table;
    table.header = cfg.operation == Operation::kValleySweep ? kValleyHeader : kFreqHeader;
    for (const auto& r : results) {
      if (terminal_success(r.status)) {
        table.rows.insert(table.rows.end(), r.rows.begin(), r.rows.end());
      }
    }
    write_file_atomic(out_dir / final_name, table.render());
  }
  for (const auto& r : results) {
    for (const auto& f : r.files) outputs.push_back(f);
  }

  bool failed = false;
  for (const auto& r : results) failed = failed || r.status == "failed";
  {
    std::lock_guard lock(mu);
    write_manifest(true);
  }
  if (failed && !options.keep_going) return kExitPointFailed;
  return kExitOk;
}

}  // namespace cavityfarm::cli

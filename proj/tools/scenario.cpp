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

#include "scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include <toml.hpp>

#include "cavityfarm/errors.hpp"

namespace cavityfarm::cli {
namespace {

constexpr double kPi = std::numbers::pi;

// Typed access to one TOML table that rejects keys it was not asked about.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  bool present() const { return table_ != nullptr; }
  bool has(std::string_view key) const { return table_ != nullptr && table_->contains(key); }

  std::optional<double> number(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) {
      return *v;
    }
    fail(key, "expected a number");
  }

  std::optional<std::int64_t> integer(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (!node->is_integer()) fail(key, "expected an integer");
    return node->value<std::int64_t>();
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (!node->is_string()) fail(key, "expected a string");
    return node->value<std::string>();
  }

  std::optional<bool> boolean(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (!node->is_boolean()) fail(key, "expected true or false");
    return node->value<bool>();
  }

  /// A number or an array of numbers.
  std::optional<std::vector<double>> numbers(std::string_view key) {
    const toml::node* node = find(key);
    if (node == nullptr) return std::nullopt;
    if (node->is_floating_point() || node->is_integer()) return std::vector{*node->value<double>()};
    const toml::array* arr = node->as_array();
    if (arr == nullptr) fail(key, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const toml::node& el : *arr) {
      if (!(el.is_floating_point() || el.is_integer())) fail(key, "array entries must be numbers");
      out.push_back(*el.value<double>());
    }
    if (out.empty()) fail(key, "array is empty");
    return out;
  }

  std::size_t count(std::string_view key, std::size_t fallback) {
    const auto v = integer(key);
    if (!v) return fallback;
    if (*v < 0) fail(key, "must be non-negative");
    return static_cast<std::size_t>(*v);
  }

  void reject_unknown() const {
    if (table_ == nullptr) return;
    for (const auto& [key, node] : *table_) {
      if (std::find(seen_.begin(), seen_.end(), key.str()) == seen_.end()) {
        throw PreconditionError("config: unknown key " + qualified(key.str()));
      }
    }
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    throw PreconditionError("config: " + qualified(key) + ": " + std::string(what));
  }

  void allow(std::initializer_list<std::string_view> keys) {
    for (auto k : keys) seen_.emplace_back(k);
  }

 private:
  const toml::node* find(std::string_view key) {
    seen_.emplace_back(key);
    return table_ == nullptr ? nullptr : table_->get(key);
  }

  std::string qualified(std::string_view key) const {
    return name_.empty() ? std::string(key) : name_ + "." + std::string(key);
  }

  const toml::table* table_;
  std::string name_;
  std::vector<std::string> seen_;
};

Section section(const toml::table& root, const char* name) {
  const toml::node* node = root.get(name);
  if (node != nullptr && !node->is_table()) {
    throw PreconditionError(std::string("config: ") + name + " must be a table");
  }
  return Section(node == nullptr ? nullptr : node->as_table(), name);
}

void read_cavity(Section s, ScenarioConfig& cfg) {
  CavityConfig& c = cfg.cavity;
  c.L0 = s.number("L0").value_or(1.0);
  c.n_modes = s.count("n_modes", 10);
  c.lambda = s.number("lambda").value_or(0.01);
  c.omega_gap = s.number("omega_gap").value_or(kPi / c.L0);
  c.T = s.number("T").value_or(2.5 * c.L0);
  c.delta = s.number("delta").value_or(0.2 * c.T);
  const auto f = s.number("f");
  const auto dt = s.number("delta_t");
  if (f && dt) s.fail("f", "give either f or delta_t, not both");
  c.delta_t = f ? *f * c.L0 - c.T : dt.value_or(c.T);
  c.r1 = s.number("r1").value_or(1.0 / 3.0);
  c.r2 = s.number("r2").value_or(2.0 / 3.0);
  const std::string sw = s.string("switching").value_or("smooth");
  if (sw == "smooth") {
    c.switching = SwitchingKind::kSmooth;
  } else if (sw == "sharp") {
    c.switching = SwitchingKind::kSharp;
  } else {
    s.fail("switching", "expected \"smooth\" or \"sharp\"");
  }
  const std::string ro = s.string("readout").value_or("interaction");
  if (ro == "interaction") {
    c.readout = ReadoutPicture::kInteraction;
  } else if (ro == "lab") {
    c.readout = ReadoutPicture::kLab;
  } else {
    s.fail("readout", "expected \"interaction\" or \"lab\"");
  }
  s.reject_unknown();
}

void read_initial(Section s, ScenarioConfig& cfg) {
  const std::string kind = s.string("kind").value_or("vacuum");
  if (kind == "vacuum") {
    cfg.initial = InitialFieldSpec::vacuum();
  } else if (kind == "thermal") {
    cfg.initial = InitialFieldSpec::thermal(s.number("nbar").value_or(1.0));
  } else if (kind == "squeezed") {
    cfg.initial = InitialFieldSpec::squeezed(s.number("r").value_or(0.5), s.count("mode", 1));
  } else {
    s.fail("kind", "expected \"vacuum\", \"thermal\" or \"squeezed\"");
  }
  s.allow({"nbar", "r", "mode"});
  s.reject_unknown();
}

void read_integrator(Section s, ScenarioConfig& cfg) {
  IntegratorConfig& ic = cfg.integrator;
  ic.steps_per_period = static_cast<int>(s.count("steps_per_period", 100));
  ic.symplectic_tolerance = s.number("symplectic_tolerance").value_or(1e-8);
  ic.max_refinements = static_cast<int>(s.count("max_refinements", 3));
  if (ic.steps_per_period < 4) s.fail("steps_per_period", "must be >= 4");
  s.reject_unknown();
}

void read_fixed_point(Section s, ScenarioConfig& cfg) {
  FixedPointOptions& fp = cfg.fixed_point;
  fp.tolerance = s.number("tolerance").value_or(fp.tolerance);
  fp.max_cycles = s.count("max_cycles", fp.max_cycles);
  const std::string method = s.string("method").value_or("doubling");
  if (method == "doubling") {
    fp.method = FixedPointMethod::kDoubling;
  } else if (method == "iterate") {
    fp.method = FixedPointMethod::kIterate;
  } else {
    s.fail("method", "expected \"doubling\" or \"iterate\"");
  }
  if (!(fp.tolerance > 0.0)) s.fail("tolerance", "must be positive");
  s.reject_unknown();
}

void read_sweep(Section s, ScenarioConfig& cfg) {
  if (auto f = s.numbers("f")) {
    if (s.has("f_min") || s.has("f_max")) s.fail("f", "give either f or a range, not both");
    cfg.f_grid = *f;
  } else {
    cfg.f_grid = default_f_grid(s.number("f_min").value_or(3.5), s.number("f_max").value_or(6.5),
                                s.number("f_step").value_or(0.01),
                                s.number("refine_step").value_or(0.0005),
                                s.number("refine_halfwidth").value_or(0.05));
  }
  const double f_min = cfg.cavity.T / cfg.cavity.L0;
  for (double f : cfg.f_grid) {
    if (!(f >= f_min - 1e-12)) {
      std::ostringstream os;
      os << "f = " << f << " is below T / L0 = " << f_min;
      s.fail("f", os.str());
    }
  }
  if (cfg.f_grid.empty()) s.fail("f", "grid is empty");
  s.reject_unknown();
}

void read_drive(Section s, ScenarioConfig& cfg, std::vector<double> amplitudes,
                std::vector<double> gammas, double periods) {
  cfg.amplitudes_over_L0 = s.numbers("amplitude_over_L0").value_or(std::move(amplitudes));
  cfg.gammas_over_omega1 = s.numbers("gamma_over_omega1").value_or(std::move(gammas));
  cfg.periods = s.number("periods").value_or(periods);
  for (double a : cfg.amplitudes_over_L0) {
    if (!(a >= 0.0 && a < 1.0)) s.fail("amplitude_over_L0", "need 0 <= A / L0 < 1");
  }
  for (double g : cfg.gammas_over_omega1) {
    if (!(g > 0.0)) s.fail("gamma_over_omega1", "must be positive");
  }
  if (!(cfg.periods > 0.0)) s.fail("periods", "must be positive");
  s.reject_unknown();
}

void read_gw(Section s, ScenarioConfig& cfg, const std::filesystem::path& base_dir) {
  GwSpec& g = cfg.gw;
  g.omega0 = s.number("omega0").value_or(cfg.omega1());
  g.Q = s.number("Q").value_or(g.Q);
  g.h0 = s.number("h0").value_or(0.0);
  g.h_omega = s.number("h_omega").value_or(g.omega0);
  g.h_phase = s.number("h_phase").value_or(0.0);
  if (auto path = s.string("waveform_csv")) {
    std::filesystem::path p(*path);
    g.waveform_csv = p.is_absolute() ? p : base_dir / p;
    if (s.has("h0")) s.fail("waveform_csv", "give either h0 or waveform_csv, not both");
  }
  g.dx0 = s.number("dx0").value_or(0.0);
  g.dv0 = s.number("dv0").value_or(0.0);
  g.steps_per_period = static_cast<int>(s.count("steps_per_period", 200));
  g.sound_speed = s.number("sound_speed");
  g.periods = s.number("periods").value_or(g.periods);
  g.cycles = s.count("cycles", 0);
  if (!(g.omega0 > 0.0)) s.fail("omega0", "must be positive");
  if (!(g.Q > 0.0)) s.fail("Q", "must be positive");
  if (!(std::abs(g.h0) < 1e-3)) s.fail("h0", "need |h0| < 1e-3");
  if (!(g.h_omega > 0.0)) s.fail("h_omega", "must be positive");
  if (g.cycles == 0 && !(g.periods > 0.0)) s.fail("periods", "must be positive");
  s.reject_unknown();
}

void read_audit(Section s, ScenarioConfig& cfg) {
  AuditSpec& a = cfg.audit;
  a.amplitude_over_L0 = s.number("amplitude_over_L0").value_or(a.amplitude_over_L0);
  a.gamma_over_omega1 = s.number("gamma_over_omega1").value_or(a.gamma_over_omega1);
  a.periods = s.number("periods").value_or(a.periods);
  a.samples = s.count("samples", a.samples);
  a.small_case = s.boolean("small_case").value_or(a.small_case);
  a.small_modes = s.count("small_modes", a.small_modes);
  a.small_cycles = s.count("small_cycles", a.small_cycles);
  if (a.samples < 100) s.fail("samples", "need at least 100");
  if (!(a.amplitude_over_L0 >= 0.0 && a.amplitude_over_L0 < 1.0)) {
    s.fail("amplitude_over_L0", "need 0 <= A / L0 < 1");
  }
  if (!(a.gamma_over_omega1 > 0.0)) s.fail("gamma_over_omega1", "must be positive");
  if (!(a.periods > 0.0)) s.fail("periods", "must be positive");
  if (a.small_modes < 1) s.fail("small_modes", "must be >= 1");
  s.reject_unknown();
}

std::string_view initial_kind(const InitialFieldSpec& s) {
  switch (s.kind) {
    case InitialFieldSpec::Kind::kVacuum:
      return "vacuum";
    case InitialFieldSpec::Kind::kThermal:
      return "thermal";
    case InitialFieldSpec::Kind::kSqueezed:
      return "squeezed";
  }
  return "?";
}

double snap(double x) { return std::round(x * 1e9) / 1e9; }

}  // namespace

std::string_view operation_name(Operation op) {
  switch (op) {
    case Operation::kValleySweep:
      return "valley-sweep";
    case Operation::kVibration:
      return "vibration";
    case Operation::kFreqResponse:
      return "freq-response";
    case Operation::kGw:
      return "gw";
    case Operation::kAudit:
      return "audit";
  }
  return "?";
}

double ScenarioConfig::omega1() const { return kPi / cavity.L0; }

nlohmann::json ScenarioConfig::resolved() const {
  using nlohmann::json;
  const CavityConfig& c = cavity;
  json j;
  j["operation"] = operation_name(operation);
  j["seed"] = seed;
  j["cavity"] = {{"L0", c.L0},
                 {"n_modes", c.n_modes},
                 {"lambda", c.lambda},
                 {"omega_gap", c.omega_gap},
                 {"T", c.T},
                 {"delta", c.delta},
                 {"delta_t", c.delta_t},
                 {"r1", c.r1},
                 {"r2", c.r2},
                 {"switching", c.switching == SwitchingKind::kSmooth ? "smooth" : "sharp"},
                 {"readout", c.readout == ReadoutPicture::kInteraction ? "interaction" : "lab"}};
  j["initial"] = {{"kind", initial_kind(initial)},
                  {"nbar", initial.nbar},
                  {"r", initial.squeezing},
                  {"mode", initial.mode}};
  j["integrator"] = {{"steps_per_period", integrator.steps_per_period},
                     {"symplectic_tolerance", integrator.symplectic_tolerance},
                     {"max_refinements", integrator.max_refinements}};
  j["fixed_point"] = {
      {"tolerance", fixed_point.tolerance},
      {"max_cycles", fixed_point.max_cycles},
      {"method", fixed_point.method == FixedPointMethod::kDoubling ? "doubling" : "iterate"}};
  switch (operation) {
    case Operation::kValleySweep:
      j["sweep"] = {{"f", f_grid}};
      break;
    case Operation::kVibration:
    case Operation::kFreqResponse:
      j["drive"] = {{"amplitude_over_L0", amplitudes_over_L0},
                    {"gamma_over_omega1", gammas_over_omega1},
                    {"periods", periods}};
      break;
    case Operation::kGw:
      j["gw"] = {{"omega0", gw.omega0},
                 {"Q", gw.Q},
                 {"h0", gw.h0},
                 {"h_omega", gw.h_omega},
                 {"h_phase", gw.h_phase},
                 {"waveform_csv", gw.waveform_csv ? gw.waveform_csv->string() : ""},
                 {"dx0", gw.dx0},
                 {"dv0", gw.dv0},
                 {"steps_per_period", gw.steps_per_period},
                 {"sound_speed", gw.sound_speed ? json(*gw.sound_speed) : json(nullptr)},
                 {"periods", gw.periods},
                 {"cycles", gw.cycles}};
      break;
    case Operation::kAudit:
      j["audit"] = {{"amplitude_over_L0", audit.amplitude_over_L0},
                    {"gamma_over_omega1", audit.gamma_over_omega1},
                    {"periods", audit.periods},
                    {"samples", audit.samples},
                    {"small_case", audit.small_case},
                    {"small_modes", audit.small_modes},
                    {"small_cycles", audit.small_cycles}};
      break;
  }
  return j;
}

std::string ScenarioConfig::hash() const { return sha256_hex(resolved().dump()); }

ScenarioConfig parse_config(std::string_view text, Operation op,
                            const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at line " << e.source().begin.line;
    throw PreconditionError(os.str());
  }
  ScenarioConfig cfg;
  cfg.operation = op;
  Section top(&root, "");
  cfg.seed = static_cast<std::uint64_t>(top.integer("seed").value_or(0));
  top.allow({"cavity", "initial", "integrator", "fixed_point", "sweep", "vibration",
             "freq_response", "gw", "audit", "output"});
  top.reject_unknown();

  read_cavity(section(root, "cavity"), cfg);
  read_initial(section(root, "initial"), cfg);
  read_integrator(section(root, "integrator"), cfg);
  read_fixed_point(section(root, "fixed_point"), cfg);
  Section output = section(root, "output");
  if (auto dir = output.string("dir")) {
    std::filesystem::path p(*dir);
    cfg.output_dir = p.is_absolute() ? p : base_dir / p;
  }
  output.reject_unknown();

  switch (op) {
    case Operation::kValleySweep:
      read_sweep(section(root, "sweep"), cfg);
      break;
    case Operation::kVibration:
      read_drive(section(root, "vibration"), cfg, {1e-3}, {4e-4}, 3.0);
      if (cfg.gammas_over_omega1.size() != 1) {
        throw PreconditionError("config: vibration.gamma_over_omega1 takes a single value");
      }
      break;
    case Operation::kFreqResponse:
      read_drive(section(root, "freq_response"), cfg, {1e-3},
                 {1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2}, 10.0);
      if (cfg.amplitudes_over_L0.size() != 1) {
        throw PreconditionError("config: freq_response.amplitude_over_L0 takes a single value");
      }
      break;
    case Operation::kGw:
      read_gw(section(root, "gw"), cfg, base_dir);
      break;
    case Operation::kAudit:
      read_audit(section(root, "audit"), cfg);
      break;
  }
  cfg.cavity.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, Operation op) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), op, path.parent_path());
}

std::vector<double> default_f_grid(double lo, double hi, double step, double refine_step,
                                   double refine_halfwidth) {
  if (!(hi >= lo) || !(step > 0.0) || !(refine_step > 0.0) || !(refine_halfwidth >= 0.0)) {
    throw PreconditionError("default_f_grid: invalid range or step");
  }
  std::vector<double> grid;
  const auto coarse = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= coarse; ++i) grid.push_back(snap(lo + static_cast<double>(i) * step));
  const auto fine = static_cast<long>(std::floor(refine_halfwidth / refine_step + 1e-9));
  for (double k = std::ceil(lo); k <= hi; k += 1.0) {
    for (long i = -fine; i <= fine; ++i) {
      const double f = snap(k + static_cast<double>(i) * refine_step);
      if (f >= lo && f <= hi) grid.push_back(f);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace cavityfarm::cli

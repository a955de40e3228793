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

#include "cavityfarm/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cavityfarm/errors.hpp"

namespace cavityfarm {
namespace {

constexpr double kPi = std::numbers::pi;

double ramp(double x) {
  // cot(0) = +inf gives tanh = 1 and a ramp value of exactly 0.
  const double cot = std::cos(x) / std::sin(x);
  return 0.5 * (1.0 - std::tanh(cot));
}

std::vector<double> base_row(std::size_t n_modes, double fraction) {
  std::vector<double> row(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double n = static_cast<double>(i + 1);
    row[i] = 2.0 / std::sqrt(n * kPi) * std::sin(n * kPi * fraction);
  }
  return row;
}

inline Eigen::Index q_index(std::size_t oscillator) {
  return static_cast<Eigen::Index>(2 * oscillator);
}

}  // namespace

void CavityConfig::validate() const {
  std::ostringstream err;
  if (!(L0 > 0.0)) err << "L0 must be positive; ";
  if (n_modes < 1) err << "need at least one field mode; ";
  if (!std::isfinite(lambda)) err << "lambda must be finite; ";
  if (!(omega_gap >= 0.0) || !std::isfinite(omega_gap)) err << "omega_gap must be >= 0; ";
  if (!(T > 0.0)) err << "T must be positive; ";
  if (!(delta > 0.0 && delta <= 0.5 * T)) err << "need 0 < delta <= T/2; ";
  if (!(delta_t >= 0.0)) err << "delta_t must be >= 0; ";
  if (!(r1 > 0.0 && r1 < r2 && r2 < 1.0)) err << "need 0 < r1 < r2 < 1; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw PreconditionError("CavityConfig: " + msg.substr(0, msg.size() - 2));
}

std::vector<std::string> CavityConfig::warnings() const {
  std::vector<std::string> out;
  const double crossing = (r2 - r1) * L0;
  if (T < crossing) {
    std::ostringstream os;
    os << "interaction time T = " << T << " is shorter than the light-crossing time "
       << crossing << " between the detectors";
    out.push_back(os.str());
  }
  return out;
}

CavityConfig CavityConfig::resonant(double L0, double lambda, double f, std::size_t n_modes) {
  CavityConfig c;
  c.L0 = L0;
  c.n_modes = n_modes;
  c.lambda = lambda;
  c.omega_gap = kPi / L0;
  c.T = 2.5 * L0;
  c.delta = 0.2 * c.T;
  c.delta_t = f * L0 - c.T;
  c.r1 = 1.0 / 3.0;
  c.r2 = 2.0 / 3.0;
  c.validate();
  return c;
}

std::vector<double> mode_frequencies(std::size_t n_modes, double L) {
  if (!(L > 0.0)) throw ModelError("mode_frequencies: L must be positive");
  std::vector<double> omega(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) omega[i] = static_cast<double>(i + 1) * kPi / L;
  return omega;
}

double switching(double t, double T, double delta) {
  if (t < 0.0 || t > T) return 0.0;
  if (t < delta) return ramp(kPi * t / delta);
  if (t < T - delta) return 1.0;
  return ramp(kPi * (T - t) / delta);
}

double switching(const CavityConfig& config, double t_cycle) {
  if (config.switching == SwitchingKind::kSharp) {
    return t_cycle >= 0.0 && t_cycle <= config.T ? 1.0 : 0.0;
  }
  return switching(t_cycle, config.T, config.delta);
}

std::vector<double> coupling_row(const CavityConfig& config, double fraction, double t_cycle) {
  std::vector<double> row = base_row(config.n_modes, fraction);
  const double scale = config.lambda * switching(config, t_cycle);
  for (double& c : row) c *= scale;
  return row;
}

HamiltonianMatrix assemble_F(const CavityConfig& config, double t_cycle, double t_global,
                             const LengthDriver& driver) {
  const double L = driver.sample(t_global).length;
  const std::size_t n = config.oscillators();
  const auto dim = static_cast<Eigen::Index>(2 * n);
  HamiltonianMatrix H{Matrix::Zero(dim, dim), t_global};
  for (std::size_t d = 0; d < 2; ++d) {
    H.F(q_index(d), q_index(d)) = config.omega_gap;
    H.F(q_index(d) + 1, q_index(d) + 1) = config.omega_gap;
  }
  const auto omega = mode_frequencies(config.n_modes, L);
  for (std::size_t m = 0; m < config.n_modes; ++m) {
    const auto k = q_index(m + 2);
    H.F(k, k) = omega[m];
    H.F(k + 1, k + 1) = omega[m];
  }
  const double fractions[2] = {config.r1, config.r2};
  for (std::size_t d = 0; d < 2; ++d) {
    const auto row = coupling_row(config, fractions[d], t_cycle);
    for (std::size_t m = 0; m < config.n_modes; ++m) {
      H.F(q_index(d), q_index(m + 2)) = row[m];
      H.F(q_index(m + 2), q_index(d)) = row[m];
    }
  }
  return H;
}

CavityGenerator::CavityGenerator(const CavityConfig& config, const LengthDriver& driver,
                                 double cycle_start, bool detectors_coupled)
    : config_(config),
      driver_(driver),
      cycle_start_(cycle_start),
      coupled_(detectors_coupled),
      base1_(base_row(config.n_modes, config.r1)),
      base2_(base_row(config.n_modes, config.r2)) {}

void CavityGenerator::rotation_increment(double ta, double tb, std::span<double> angles) const {
  const double detector = config_.omega_gap * (tb - ta);
  angles[0] = detector;
  angles[1] = detector;
  const double integral = driver_.inverse_length_integral(ta, tb);
  for (std::size_t m = 0; m < config_.n_modes; ++m) {
    angles[m + 2] = static_cast<double>(m + 1) * kPi * integral;
  }
}

void CavityGenerator::frequencies(double t, std::span<double> omega) const {
  omega[0] = config_.omega_gap;
  omega[1] = config_.omega_gap;
  const double L = driver_.sample(t).length;
  for (std::size_t m = 0; m < config_.n_modes; ++m) {
    omega[m + 2] = static_cast<double>(m + 1) * kPi / L;
  }
}

void CavityGenerator::coupling(double t, Matrix& out) const {
  out.setZero();
  if (!coupled_) return;
  const double scale = config_.lambda * switching(config_, t - cycle_start_);
  if (scale == 0.0) return;
  for (std::size_t m = 0; m < config_.n_modes; ++m) {
    const auto k = q_index(m + 2);
    const double c1 = scale * base1_[m];
    const double c2 = scale * base2_[m];
    out(0, k) = c1;
    out(k, 0) = c1;
    out(2, k) = c2;
    out(k, 2) = c2;
  }
}

void CavityGenerator::coupling_block(double t, Matrix& out) const {
  out.setZero();
  if (!coupled_) return;
  const double scale = config_.lambda * switching(config_, t - cycle_start_);
  if (scale == 0.0) return;
  for (std::size_t m = 0; m < config_.n_modes; ++m) {
    const auto k = static_cast<Eigen::Index>(2 * m);
    out(0, k) = scale * base1_[m];
    out(2, k) = scale * base2_[m];
  }
}

double CavityGenerator::max_frequency(double t0, double t1) const {
  const double top_mode = static_cast<double>(config_.n_modes) * kPi / driver_.min_length(t0, t1);
  return std::max(config_.omega_gap, top_mode);
}

}  // namespace cavityfarm

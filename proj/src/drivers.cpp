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

#include "cavityfarm/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "cavityfarm/errors.hpp"

namespace cavityfarm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LengthSample checked(LengthSample s, double t) {
  if (!(s.length > 0.0) || !std::isfinite(s.length)) {
    std::ostringstream os;
    os << "cavity length " << s.length << " at t = " << t << " is not positive";
    throw ModelError(os.str());
  }
  return s;
}

double uniform_spacing(const std::vector<double>& times, const char* what) {
  if (times.size() < 4) {
    throw PreconditionError(std::string(what) + ": need at least 4 samples");
  }
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw PreconditionError(std::string(what) + ": times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw PreconditionError(std::string(what) + ": times must be strictly increasing");
    }
    const double expected = times.front() + dt * static_cast<double>(i);
    if (std::abs(times[i] - expected) > 1e-6 * dt) {
      throw PreconditionError(std::string(what) + ": times must be uniformly spaced");
    }
  }
  return dt;
}

}  // namespace

double LengthDriver::inverse_length_integral(double t0, double t1) const {
  if (t1 <= t0) return 0.0;
  const double period = shortest_period();
  const double panel = std::isfinite(period) ? period / 32.0 : t1 - t0;
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((t1 - t0) / panel)));
  const double width = (t1 - t0) / static_cast<double>(panels);
  auto inv = [this](double t) { return 1.0 / sample(t).length; };
  double total = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = t0 + width * static_cast<double>(k);
    const double b = k + 1 == panels ? t1 : a + width;
    total += boost::math::quadrature::gauss<double, 7>::integrate(inv, a, b);
  }
  return total;
}

double LengthDriver::min_length(double t0, double t1) const {
  double lo = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 9;
  for (int i = 0; i < kSamples; ++i) {
    const double t = t0 + (t1 - t0) * i / (kSamples - 1);
    lo = std::min(lo, sample(t).length);
  }
  return lo;
}

StaticDriver::StaticDriver(double L0) : L0_(L0) {
  if (!(L0 > 0.0)) throw PreconditionError("StaticDriver: L0 must be positive");
}

LengthSample StaticDriver::sample(double) const { return {L0_, 0.0}; }

double StaticDriver::inverse_length_integral(double t0, double t1) const {
  return (t1 - t0) / L0_;
}

SinusoidDriver::SinusoidDriver(double L0, double amplitude, double gamma)
    : L0_(L0), amplitude_(amplitude), gamma_(gamma) {
  if (!(L0 > 0.0)) throw PreconditionError("SinusoidDriver: L0 must be positive");
  if (amplitude < 0.0 || amplitude >= L0) {
    throw PreconditionError("SinusoidDriver: need 0 <= A < L0");
  }
  if (gamma < 0.0) throw PreconditionError("SinusoidDriver: gamma must be non-negative");
}

LengthSample SinusoidDriver::sample(double t) const {
  if (t < 0.0) throw PreconditionError("SinusoidDriver: defined for t >= 0 only");
  const double phase = gamma_ * t;
  return checked({L0_ + amplitude_ * std::sin(phase), amplitude_ * gamma_ * std::cos(phase)}, t);
}

double SinusoidDriver::shortest_period() const {
  return gamma_ > 0.0 && amplitude_ > 0.0 ? kTwoPi / gamma_
                                          : std::numeric_limits<double>::infinity();
}

double SinusoidDriver::min_length(double, double) const { return L0_ - amplitude_; }

SampledDriver::SampledDriver(const std::vector<double>& times, const std::vector<double>& lengths)
    : t0_(times.empty() ? 0.0 : times.front()),
      t1_(times.empty() ? 0.0 : times.back()),
      dt_(uniform_spacing(times, "SampledDriver")),
      spline_(lengths.begin(), lengths.end(), t0_, dt_) {
  if (lengths.size() != times.size()) {
    throw PreconditionError("SampledDriver: column lengths differ");
  }
  for (double L : lengths) {
    if (!(L > 0.0)) throw PreconditionError("SampledDriver: lengths must be positive");
  }
}

LengthSample SampledDriver::sample(double t) const {
  if (t < t0_ || t > t1_) {
    std::ostringstream os;
    os << "SampledDriver: t = " << t << " outside [" << t0_ << ", " << t1_ << "]";
    throw PreconditionError(os.str());
  }
  return checked({spline_(t), spline_.prime(t)}, t);
}

SinusoidStrain::SinusoidStrain(double h0, double omega, double phase)
    : h0_(h0), omega_(omega), phase_(phase) {}

double SinusoidStrain::strain(double t) const { return h0_ * std::sin(omega_ * t + phase_); }

double SinusoidStrain::strain_rate(double t) const {
  return h0_ * omega_ * std::cos(omega_ * t + phase_);
}

double SinusoidStrain::shortest_period() const {
  return omega_ > 0.0 ? kTwoPi / omega_ : std::numeric_limits<double>::infinity();
}

SampledStrain::SampledStrain(const std::vector<double>& times, const std::vector<double>& strains)
    : t0_(times.empty() ? 0.0 : times.front()),
      t1_(times.empty() ? 0.0 : times.back()),
      dt_(uniform_spacing(times, "SampledStrain")),
      spline_(strains.begin(), strains.end(), t0_, dt_) {
  if (strains.size() != times.size()) {
    throw PreconditionError("SampledStrain: column lengths differ");
  }
}

double SampledStrain::strain(double t) const {
  return t < t0_ || t > t1_ ? 0.0 : spline_(t);
}

double SampledStrain::strain_rate(double t) const {
  return t < t0_ || t > t1_ ? 0.0 : spline_.prime(t);
}

GwSpringDriver::GwSpringDriver(GwSpringParams params,
                               std::shared_ptr<const StrainWaveform> waveform)
    : params_(params), waveform_(std::move(waveform)) {
  if (!waveform_) throw PreconditionError("GwSpringDriver: missing waveform");
  if (!(params_.L0 > 0.0)) throw PreconditionError("GwSpringDriver: L0 must be positive");
  if (!(params_.omega0 > 0.0)) throw PreconditionError("GwSpringDriver: omega0 must be positive");
  if (!(params_.Q > 0.0)) throw PreconditionError("GwSpringDriver: Q must be positive");
  if (params_.steps_per_period < 4) {
    throw PreconditionError("GwSpringDriver: steps_per_period must be >= 4");
  }
  h_ = std::min(kTwoPi / params_.omega0, waveform_->shortest_period()) / params_.steps_per_period;
  nodes_.push_back(derivative_node(0.0, params_.dx0, params_.dv0));
}

GwSpringDriver::Node GwSpringDriver::derivative_node(double t, double x, double v) const {
  const double h = waveform_->strain(t);
  if (!(std::abs(h) < kMaxStrain)) {
    std::ostringstream os;
    os << "GwSpringDriver: |h(" << t << ")| = " << std::abs(h) << " violates |h| < " << kMaxStrain;
    throw ModelError(os.str());
  }
  const double w2 = params_.omega0 * params_.omega0;
  const double a = -(params_.omega0 / params_.Q) * v - w2 * x - 0.5 * w2 * params_.L0 * h;
  return {x, v, a};
}

void GwSpringDriver::extend_to(double t) const {
  const auto needed = static_cast<std::size_t>(std::floor(t / h_)) + 2;
  while (nodes_.size() < needed) {
    const Node& n0 = nodes_.back();
    const double t0 = h_ * static_cast<double>(nodes_.size() - 1);
    const double th = t0 + 0.5 * h_;
    const Node k1 = n0;
    const Node k2 = derivative_node(th, n0.x + 0.5 * h_ * k1.v, n0.v + 0.5 * h_ * k1.a);
    const Node k3 = derivative_node(th, n0.x + 0.5 * h_ * k2.v, n0.v + 0.5 * h_ * k2.a);
    const Node k4 = derivative_node(t0 + h_, n0.x + h_ * k3.v, n0.v + h_ * k3.a);
    const double x = n0.x + h_ / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    const double v = n0.v + h_ / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
    nodes_.push_back(derivative_node(t0 + h_, x, v));
  }
}

std::pair<double, double> GwSpringDriver::displacement(double t) const {
  if (t < 0.0) throw PreconditionError("GwSpringDriver: defined for t >= 0 only");
  extend_to(t);
  const auto k = static_cast<std::size_t>(std::floor(t / h_));
  const double u = t / h_ - static_cast<double>(k);
  const Node& a = nodes_[k];
  const Node& b = nodes_[k + 1];
  // Cubic Hermite basis on [0, 1].
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  const double x = h00 * a.x + h10 * h_ * a.v + h01 * b.x + h11 * h_ * b.v;
  const double v = h00 * a.v + h10 * h_ * a.a + h01 * b.v + h11 * h_ * b.a;
  return {x, v};
}

LengthSample GwSpringDriver::sample(double t) const {
  const auto [x, v] = displacement(t);
  const double h = waveform_->strain(t);
  if (!(std::abs(h) < kMaxStrain)) {
    throw ModelError("GwSpringDriver: strain exceeds the linearised range");
  }
  const double L0 = params_.L0;
  return checked({L0 * (1.0 + 0.5 * h) + x, 0.5 * L0 * waveform_->strain_rate(t) + v}, t);
}

double GwSpringDriver::shortest_period() const {
  return std::min(kTwoPi / params_.omega0, waveform_->shortest_period());
}

double GwSpringDriver::correction_scale(double t) const {
  return 1.0 + 0.5 * waveform_->strain(t);
}

double adiabaticity_figure(const LengthDriver& driver, double t0, double t1) {
  if (!(t1 >= t0)) throw PreconditionError("adiabaticity_figure: need t1 >= t0");
  const double period = driver.shortest_period();
  double points = 1000.0;
  if (std::isfinite(period)) points = std::max(points, std::ceil(20.0 * (t1 - t0) / period) + 1.0);
  const auto n = static_cast<std::size_t>(points);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    peak = std::max(peak, std::abs(driver.sample(t).rate));
  }
  return peak;
}

TwoColumnTable read_two_column_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  TwoColumnTable table;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": expected two comma-separated columns";
      throw PreconditionError(os.str());
    }
    try {
      table.first.push_back(std::stod(line.substr(0, comma)));
      table.second.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": not a number";
      throw PreconditionError(os.str());
    }
  }
  return table;
}

}  // namespace cavityfarm

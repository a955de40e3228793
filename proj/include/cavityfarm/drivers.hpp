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

// Cavity length histories L(t) with their rates dL/dt (c = 1).

#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace cavityfarm {

struct LengthSample {
  double length = 0.0;
  double rate = 0.0;
};

class LengthDriver {
 public:
  virtual ~LengthDriver() = default;

  /// L(t) and dL/dt. Throws ModelError if L <= 0 and PreconditionError
  /// outside the driver's time domain.
  virtual LengthSample sample(double t) const = 0;

  /// integral of dt / L(t) over [t0, t1]; composite Gauss-Legendre by default.
  virtual double inverse_length_integral(double t0, double t1) const;

  /// Shortest time scale of the history; infinity for a static cavity.
  virtual double shortest_period() const { return std::numeric_limits<double>::infinity(); }

  /// Extra factor on the moving-boundary correction matrices (1 unless a
  /// strain field rescales proper distances).
  virtual double correction_scale(double /*t*/) const { return 1.0; }

  /// Lower bound for L on [t0, t1], used to size integration steps.
  virtual double min_length(double t0, double t1) const;
};

/// L(t) = L0.
class StaticDriver final : public LengthDriver {
 public:
  explicit StaticDriver(double L0);
  LengthSample sample(double t) const override;
  double inverse_length_integral(double t0, double t1) const override;
  double min_length(double, double) const override { return L0_; }

 private:
  double L0_;
};

/// L(t) = L0 + A sin(gamma t) for t >= 0.
class SinusoidDriver final : public LengthDriver {
 public:
  SinusoidDriver(double L0, double amplitude, double gamma);
  LengthSample sample(double t) const override;
  double shortest_period() const override;
  double min_length(double t0, double t1) const override;

  double rest_length() const { return L0_; }
  double amplitude() const { return amplitude_; }
  double gamma() const { return gamma_; }
  /// gamma * A, the peak wall speed.
  double adiabaticity() const { return gamma_ * amplitude_; }

 private:
  double L0_, amplitude_, gamma_;
};

/// Uniform (t, L) table interpolated with a cubic B-spline.
class SampledDriver final : public LengthDriver {
 public:
  SampledDriver(const std::vector<double>& times, const std::vector<double>& lengths);
  LengthSample sample(double t) const override;
  double shortest_period() const override { return 4.0 * dt_; }
  double t_begin() const { return t0_; }
  double t_end() const { return t1_; }

 private:
  double t0_, t1_, dt_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

/// Strain history h(t) seen along the cavity axis.
class StrainWaveform {
 public:
  virtual ~StrainWaveform() = default;
  virtual double strain(double t) const = 0;
  virtual double strain_rate(double t) const = 0;
  virtual double shortest_period() const { return std::numeric_limits<double>::infinity(); }
};

class ConstantStrain final : public StrainWaveform {
 public:
  explicit ConstantStrain(double h0) : h0_(h0) {}
  double strain(double) const override { return h0_; }
  double strain_rate(double) const override { return 0.0; }

 private:
  double h0_;
};

/// h(t) = h0 sin(omega t + phase).
class SinusoidStrain final : public StrainWaveform {
 public:
  SinusoidStrain(double h0, double omega, double phase = 0.0);
  double strain(double t) const override;
  double strain_rate(double t) const override;
  double shortest_period() const override;

 private:
  double h0_, omega_, phase_;
};

/// Uniform (t, h) table; zero outside the table.
class SampledStrain final : public StrainWaveform {
 public:
  SampledStrain(const std::vector<double>& times, const std::vector<double>& strains);
  double strain(double t) const override;
  double strain_rate(double t) const override;
  double shortest_period() const override { return 4.0 * dt_; }

 private:
  double t0_, t1_, dt_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

struct GwSpringParams {
  double L0 = 1.0;
  double omega0 = 1.0;  // sqrt(k/m)
  double Q = 1.0;
  double dx0 = 0.0;     // initial displacement
  double dv0 = 0.0;     // initial velocity
  int steps_per_period = 200;
};

/// Mirrors joined by a damped spring and driven by strain:
///   dx'' = -(omega0/Q) dx' - omega0^2 dx - 1/2 omega0^2 L0 h(t),
///   L(t) = L0 (1 + h/2) + dx.
/// Integrated lazily with RK4 as later times are requested and read back
/// through cubic Hermite interpolation. Holds mutable state: one run only.
class GwSpringDriver final : public LengthDriver {
 public:
  GwSpringDriver(GwSpringParams params, std::shared_ptr<const StrainWaveform> waveform);

  LengthSample sample(double t) const override;
  double shortest_period() const override;
  double correction_scale(double t) const override;

  /// dx(t), dx'(t).
  std::pair<double, double> displacement(double t) const;

  const GwSpringParams& params() const { return params_; }

  /// Largest |h| tolerated by the linearised model.
  static constexpr double kMaxStrain = 1e-3;

 private:
  struct Node {
    double x, v, a;
  };
  void extend_to(double t) const;
  Node derivative_node(double t, double x, double v) const;

  GwSpringParams params_;
  std::shared_ptr<const StrainWaveform> waveform_;
  double h_;
  mutable std::vector<Node> nodes_;
};

/// max |dL/dt| over [t0, t1], sampled with at least 20 points per shortest
/// period (and never fewer than 1000 points).
double adiabaticity_figure(const LengthDriver& driver, double t0, double t1);

/// Reads a two-column CSV with a header row.
struct TwoColumnTable {
  std::vector<double> first;
  std::vector<double> second;
};
TwoColumnTable read_two_column_csv(const std::filesystem::path& path);

}  // namespace cavityfarm

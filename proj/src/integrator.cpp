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

#include "cavityfarm/integrator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cavityfarm/errors.hpp"

namespace cavityfarm {
namespace {

// out = Omega * m, Omega block diagonal [[0, 1], [-1, 0]].
void apply_omega(const Matrix& m, Matrix& out) {
  out.resize(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); i += 2) {
    out.row(i) = m.row(i + 1);
    out.row(i + 1) = -m.row(i);
  }
}

// Row pairs of m -> R(theta_i)^T rows (transpose=true) or R(theta_i) rows.
void rotate_rows(Matrix& m, std::span<const double> c, std::span<const double> s,
                 std::size_t first_oscillator, bool transpose) {
  const double sign = transpose ? -1.0 : 1.0;
  const auto pairs = static_cast<std::size_t>(m.rows() / 2);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t osc = first_oscillator + i;
    const auto r = static_cast<Eigen::Index>(2 * i);
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      const double q = m(r, col);
      const double p = m(r + 1, col);
      m(r, col) = c[osc] * q + sign * s[osc] * p;
      m(r + 1, col) = -sign * s[osc] * q + c[osc] * p;
    }
  }
}

// m -> m R(theta_j) on column pairs.
void rotate_cols(Matrix& m, std::span<const double> c, std::span<const double> s,
                 std::size_t first_oscillator) {
  const auto pairs = static_cast<std::size_t>(m.cols() / 2);
  for (std::size_t j = 0; j < pairs; ++j) {
    const std::size_t osc = first_oscillator + j;
    const auto k = static_cast<Eigen::Index>(2 * j);
    for (Eigen::Index row = 0; row < m.rows(); ++row) {
      const double q = m(row, k);
      const double p = m(row, k + 1);
      m(row, k) = c[osc] * q - s[osc] * p;
      m(row, k + 1) = s[osc] * q + c[osc] * p;
    }
  }
}

void check_finite(const Matrix& F, double t) {
  if (!F.allFinite()) {
    std::ostringstream os;
    os << "generator has non-finite entries at t = " << t;
    throw IntegrationError(os.str());
  }
}

// Interaction-picture generator G_I = Omega R^T F1 R, stored either densely or
// as the two off-diagonal blocks of a bipartite coupling.
class InteractionGenerator {
 public:
  explicit InteractionGenerator(const SplitGenerator& gen)
      : gen_(gen), n_(gen.oscillators()), split_(gen.bipartite_split()), c_(n_), s_(n_) {
    const auto dim = static_cast<Eigen::Index>(2 * n_);
    if (split_ > 0) {
      const auto p = static_cast<Eigen::Index>(2 * split_);
      block_.resize(p, dim - p);
    } else {
      block_.resize(dim, dim);
    }
  }

  void evaluate(double t, std::span<const double> theta) {
    if (split_ > 0) {
      gen_.coupling_block(t, block_);
    } else {
      gen_.coupling(t, block_);
    }
    check_finite(block_, t);
    for (std::size_t i = 0; i < n_; ++i) {
      c_[i] = std::cos(theta[i]);
      s_[i] = std::sin(theta[i]);
    }
    rotate_rows(block_, c_, s_, 0, /*transpose=*/true);
    rotate_cols(block_, c_, s_, split_);
    apply_omega(block_, scratch_);
    upper_t_ = scratch_.transpose();
    if (split_ > 0) {
      transposed_ = block_.transpose();
      apply_omega(transposed_, scratch_);
      lower_t_ = scratch_.transpose();
    }
  }

  // out = x * G_I^T. The propagator is carried transposed because the
  // bipartite products then act on contiguous column blocks.
  void multiply_transposed(const Matrix& x, Matrix& out) const {
    out.resize(x.rows(), x.cols());
    if (split_ == 0) {
      out.noalias() = x * upper_t_;
      return;
    }
    const auto p = lower_t_.rows();
    const auto q = x.cols() - p;
    out.leftCols(p).noalias() = x.rightCols(q) * upper_t_;
    out.rightCols(q).noalias() = x.leftCols(p) * lower_t_;
  }

 private:
  const SplitGenerator& gen_;
  std::size_t n_;
  std::size_t split_;
  std::vector<double> c_, s_;
  Matrix block_, transposed_, scratch_, upper_t_, lower_t_;
};

Matrix integrate_lab(std::size_t oscillators, const HamiltonianSupplier& generator, double t0,
                     double t1, std::size_t steps) {
  const auto dim = static_cast<Eigen::Index>(2 * oscillators);
  Matrix S = Matrix::Identity(dim, dim);
  if (steps == 0) return S;
  const double h = (t1 - t0) / static_cast<double>(steps);
  Matrix ga, gm, gb, k1, k2, k3, k4, tmp;
  auto omega_f = [&](double t, Matrix& out) {
    HamiltonianMatrix H = generator(t);
    if (H.F.rows() != dim || H.F.cols() != dim) {
      throw PreconditionError("generator dimension does not match the state");
    }
    check_finite(H.F, t);
    apply_omega(H.F, out);
  };
  omega_f(t0, ga);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + h * static_cast<double>(k);
    omega_f(t + 0.5 * h, gm);
    omega_f(k + 1 == steps ? t1 : t + h, gb);
    k1.noalias() = ga * S;
    tmp = S + (0.5 * h) * k1;
    k2.noalias() = gm * tmp;
    tmp = S + (0.5 * h) * k2;
    k3.noalias() = gm * tmp;
    tmp = S + h * k3;
    k4.noalias() = gb * tmp;
    S += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    std::swap(ga, gb);
  }
  return S;
}

Matrix integrate_split(const SplitGenerator& gen, double t0, double t1, std::size_t steps) {
  const std::size_t n = gen.oscillators();
  const auto dim = static_cast<Eigen::Index>(2 * n);
  Matrix St = Matrix::Identity(dim, dim);  // S^T of the interaction-picture propagator
  std::vector<double> theta(n, 0.0), theta_mid(n), theta_end(n), inc(n);
  if (steps > 0) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    InteractionGenerator g0(gen), gm(gen), g1(gen);
    InteractionGenerator* ga = &g0;
    InteractionGenerator* gb = &g1;
    Matrix k1, k2, k3, k4, tmp;
    ga->evaluate(t0, theta);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = t0 + h * static_cast<double>(k);
      const double tm = t + 0.5 * h;
      const double te = k + 1 == steps ? t1 : t + h;
      gen.rotation_increment(t, tm, inc);
      for (std::size_t i = 0; i < n; ++i) theta_mid[i] = theta[i] + inc[i];
      gen.rotation_increment(tm, te, inc);
      for (std::size_t i = 0; i < n; ++i) theta_end[i] = theta_mid[i] + inc[i];
      gm.evaluate(tm, theta_mid);
      gb->evaluate(te, theta_end);
      ga->multiply_transposed(St, k1);
      tmp = St + (0.5 * h) * k1;
      gm.multiply_transposed(tmp, k2);
      k1 += 2.0 * k2;
      tmp = St + (0.5 * h) * k2;
      gm.multiply_transposed(tmp, k3);
      k1 += 2.0 * k3;
      tmp = St + h * k3;
      gb->multiply_transposed(tmp, k4);
      St += (h / 6.0) * (k1 + k4);
      std::swap(ga, gb);
      theta.swap(theta_end);
    }
  } else if (t1 > t0) {
    gen.rotation_increment(t0, t1, theta);
  }
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = std::cos(theta[i]);
    s[i] = std::sin(theta[i]);
  }
  Matrix S = St.transpose();
  rotate_rows(S, c, s, 0, /*transpose=*/false);
  return S;
}

template <class Integrate>
SymplecticPropagator refine_until_symplectic(Integrate&& integrate, std::size_t base_steps,
                                             double t0, double t1,
                                             const IntegratorConfig& config) {
  SymplecticPropagator prop;
  prop.t0 = t0;
  prop.t1 = t1;
  std::size_t steps = base_steps;
  double defect = 0.0;
  for (int attempt = 0;; ++attempt) {
    prop.S = integrate(steps);
    prop.steps = steps;
    defect = prop.defect();
    if (defect <= config.symplectic_tolerance || attempt >= config.max_refinements || steps == 0) {
      break;
    }
    steps *= 2;
  }
  if (defect > 10.0 * config.symplectic_tolerance) {
    std::ostringstream os;
    os << "symplectic defect " << defect << " after " << prop.steps << " steps exceeds 10x tolerance "
       << config.symplectic_tolerance;
    throw DiagnosticError(os.str());
  }
  if (config.doubling_audit && prop.steps > 0) {
    const Matrix fine = integrate(2 * prop.steps);
    prop.audit_delta = (fine - prop.S).cwiseAbs().maxCoeff();
  }
  return prop;
}

void check_interval(double t0, double t1) {
  if (!(t1 >= t0)) throw PreconditionError("propagate: need t1 >= t0");
}

}  // namespace

void SplitGenerator::coupling_block(double t, Matrix& out) const {
  const auto dim = static_cast<Eigen::Index>(2 * oscillators());
  Matrix full = Matrix::Zero(dim, dim);
  coupling(t, full);
  const auto p = static_cast<Eigen::Index>(2 * bipartite_split());
  out = full.topRightCorner(p, dim - p);
}

HamiltonianMatrix SplitGenerator::hamiltonian(double t) const {
  const std::size_t n = oscillators();
  const auto dim = static_cast<Eigen::Index>(2 * n);
  HamiltonianMatrix H{Matrix::Zero(dim, dim), t};
  coupling(t, H.F);
  std::vector<double> omega(n);
  frequencies(t, omega);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    H.F(k, k) += omega[i];
    H.F(k + 1, k + 1) += omega[i];
  }
  return H;
}

std::size_t step_count(double duration, double max_frequency, int steps_per_period) {
  if (steps_per_period <= 0) throw PreconditionError("steps_per_period must be positive");
  if (duration <= 0.0) return 0;
  if (max_frequency <= 0.0) return 1;
  const double periods = duration * max_frequency / (2.0 * std::numbers::pi);
  const double raw = std::ceil(periods * steps_per_period - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, raw));
}

SymplecticPropagator propagate(std::size_t oscillators, const HamiltonianSupplier& generator,
                               double t0, double t1, const IntegratorConfig& config) {
  check_interval(t0, t1);
  double omega_max = 0.0;
  for (double t : {t0, 0.5 * (t0 + t1), t1}) {
    const HamiltonianMatrix H = generator(t);
    check_finite(H.F, t);
    omega_max = std::max(omega_max, H.F.cwiseAbs().rowwise().sum().maxCoeff());
  }
  const std::size_t base = step_count(t1 - t0, omega_max, config.steps_per_period);
  return refine_until_symplectic(
      [&](std::size_t steps) { return integrate_lab(oscillators, generator, t0, t1, steps); }, base,
      t0, t1, config);
}

SymplecticPropagator propagate(const SplitGenerator& generator, double t0, double t1,
                               const IntegratorConfig& config) {
  check_interval(t0, t1);
  const std::size_t base =
      step_count(t1 - t0, generator.max_frequency(t0, t1), config.steps_per_period);
  return refine_until_symplectic(
      [&](std::size_t steps) { return integrate_split(generator, t0, t1, steps); }, base, t0, t1,
      config);
}

GaussianState evolve(const GaussianState& state, const HamiltonianSupplier& generator, double t0,
                     double t1, const IntegratorConfig& config) {
  return state.transformed(propagate(state.oscillators(), generator, t0, t1, config).S);
}

GaussianState evolve(const GaussianState& state, const SplitGenerator& generator, double t0,
                     double t1, const IntegratorConfig& config) {
  if (generator.oscillators() != state.oscillators()) {
    throw PreconditionError("generator dimension does not match the state");
  }
  return state.transformed(propagate(generator, t0, t1, config).S);
}

}  // namespace cavityfarm

// Copyright 2026 spincv contributors
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

#include "spincv/irb/fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "spincv/common/errors.hpp"
#include "spincv/common/parallel.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {

namespace {

constexpr double kPMax = 1.05;
constexpr double kPMin = 1e-6;

double initial_rate(std::span<const int> lengths, std::span<const double> y, double b) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double r = y[i] - b;
    if (r <= 1e-6) continue;
    const double x = lengths[i], l = std::log(r);
    sx += x;
    sy += l;
    sxx += x * x;
    sxy += x * l;
    ++n;
  }
  if (n < 2) return 0.9;
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) return 0.9;
  return std::clamp(std::exp((n * sxy - sx * sy) / den), 0.05, 1.0);
}

}  // namespace

double DecayFit::operator()(double m) const { return A * std::pow(p, m) + B; }

DecayFit fit_decay(std::span<const int> lengths, std::span<const double> y, const FitOptions& options) {
  if (lengths.size() != y.size()) throw ValidationError("fit_decay: lengths and survival differ in size");
  const int np = options.fix_b ? 2 : 3;
  if (static_cast<int>(lengths.size()) < np) throw ValidationError("fit_decay: too few points");

  DecayFit fit;
  fit.b_fixed = options.fix_b;
  fit.B = options.fix_b ? options.fixed_b : 0.5;
  fit.p = initial_rate(lengths, y, fit.B);
  fit.A = y[0] - fit.B;

  const std::size_t n = lengths.size();
  // theta = (A, p, B)
  auto residuals = [&](double a, double p, double b, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i) r(i) = a * std::pow(p, lengths[i]) + b - y[i];
  };
  auto jacobian = [&](double a, double p, Eigen::MatrixXd& jac) {
    for (std::size_t i = 0; i < n; ++i) {
      const double m = lengths[i];
      jac(i, 0) = std::pow(p, m);
      jac(i, 1) = m == 0 ? 0.0 : a * m * std::pow(p, m - 1);
      if (np == 3) jac(i, 2) = 1.0;
    }
  };
  Eigen::VectorXd r(n), r_new(n);
  Eigen::MatrixXd jac(n, np);
  residuals(fit.A, fit.p, fit.B, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < options.max_iterations; ++it) {
    jacobian(fit.A, fit.p, jac);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    if (g.cwiseAbs().maxCoeff() < 1e-15) {
      fit.converged = true;
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::MatrixXd h = jtj;
      for (int k = 0; k < np; ++k) h(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::VectorXd step = -h.ldlt().solve(g);
      const double a = fit.A + step(0);
      const double p = std::clamp(fit.p + step(1), kPMin, kPMax);
      const double b = np == 3 ? fit.B + step(2) : fit.B;
      residuals(a, p, b, r_new);
      const double c = r_new.squaredNorm();
      if (c <= cost) {
        const double change = std::abs(a - fit.A) + std::abs(p - fit.p) + std::abs(b - fit.B);
        fit.A = a;
        fit.p = p;
        fit.B = b;
        r = r_new;
        const double old = cost;
        cost = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (change < 1e-13 || old - c <= 1e-16 * std::max(old, 1e-300)) fit.converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      fit.converged = true;  // no descent direction left
      break;
    }
    if (fit.converged) break;
  }
  if (!(fit.p > 0.0 && fit.p <= kPMax) || !std::isfinite(fit.A) || !std::isfinite(fit.B)) fit.converged = false;

  fit.rms_residual = std::sqrt(cost / static_cast<double>(n));
  jacobian(fit.A, fit.p, jac);
  const int dof = static_cast<int>(n) - np;
  const double s2 = dof > 0 ? cost / dof : 0.0;
  const Eigen::MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() * s2;
  // Reorder (A, p, B) -> (A, B, p).
  const int map[3] = {0, 2, 1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      fit.covariance[i][j] = (map[i] < np && map[j] < np) ? cov(map[i], map[j]) : 0.0;
  return fit;
}

DecayFit fit_decay(const RBDataset& data, const FitOptions& options) {
  const auto y = data.mean_survivals();
  return fit_decay(data.lengths, y, options);
}

double clifford_fidelity(double p_ref) {
  constexpr double d = kTwoQubitDimension;
  return 1.0 - (d - 1.0) * (1.0 - p_ref) / d;
}

double interleaved_gate_fidelity(double p_ref, double p_int) {
  constexpr double d = kTwoQubitDimension;
  return 1.0 - (d - 1.0) * (1.0 - p_int / p_ref) / d;
}

namespace {

RBDataset resample(const RBDataset& d, Rng& rng) {
  RBDataset out;
  out.lengths = d.lengths;
  out.survived.resize(d.lengths.size());
  out.shots = out.survived;
  for (std::size_t i = 0; i < d.lengths.size(); ++i) {
    const std::size_t n = d.survived[i].size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    out.survived[i].resize(n);
    out.shots[i].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = pick(rng);
      const int shots = d.shots[i][j];
      const double f = static_cast<double>(d.survived[i][j]) / shots;
      out.survived[i][k] = std::binomial_distribution<int>(shots, f)(rng);
      out.shots[i][k] = shots;
    }
  }
  return out;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double stddev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

IrbResult fit_and_extract(const RBDataset& reference, const RBDataset& interleaved, const IrbOptions& options) {
  if (reference.lengths != interleaved.lengths)
    throw ValidationError("fit_and_extract: reference and interleaved lengths differ");
  if (reference.lengths.empty()) throw ValidationError("fit_and_extract: empty dataset");
  IrbResult res;
  res.reference = fit_decay(reference, options.fit);
  res.interleaved = fit_decay(interleaved, options.fit);
  res.converged = res.reference.converged && res.interleaved.converged;
  res.f_clifford = clifford_fidelity(res.reference.p);
  res.f_gate = interleaved_gate_fidelity(res.reference.p, res.interleaved.p);
  res.unphysical = res.f_gate > 1.0;

  const int nb = options.bootstrap_samples;
  if (nb >= 2) {
    std::vector<double> fc(static_cast<std::size_t>(nb)), fg(static_cast<std::size_t>(nb));
    parallel_for(static_cast<std::size_t>(nb), [&](std::size_t b) {
      Rng rng(derive_seed(options.seed, b));
      const auto ref = fit_decay(resample(reference, rng), options.fit);
      const auto inter = fit_decay(resample(interleaved, rng), options.fit);
      fc[b] = clifford_fidelity(ref.p);
      fg[b] = interleaved_gate_fidelity(ref.p, inter.p);
    });
    res.bootstrap_samples = nb;
    res.f_clifford_sigma = stddev(fc);
    res.f_gate_sigma = stddev(fg);
    res.f_gate_low = percentile(fg, 0.025);
    res.f_gate_high = percentile(fg, 0.975);
  } else {
    res.f_gate_low = res.f_gate_high = res.f_gate;
  }
  return res;
}

}  // namespace spincv

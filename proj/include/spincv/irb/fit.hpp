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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spincv/irb/rb.hpp"

namespace spincv {

/// f(m) = A p^m + B.
struct DecayFit {
  double A = 0.0;
  double B = 0.5;
  double p = 1.0;
  std::array<std::array<double, 3>, 3> covariance{};  // (A, B, p)
  double rms_residual = 0.0;
  bool converged = false;
  bool b_fixed = false;

  double operator()(double m) const;
};

struct FitOptions {
  bool fix_b = false;
  double fixed_b = 0.5;
  int max_iterations = 200;
};

DecayFit fit_decay(std::span<const int> lengths, std::span<const double> survival, const FitOptions& options = {});
DecayFit fit_decay(const RBDataset& data, const FitOptions& options = {});

constexpr int kTwoQubitDimension = 4;

double clifford_fidelity(double p_ref);
double interleaved_gate_fidelity(double p_ref, double p_int);

struct IrbOptions {
  FitOptions fit;
  int bootstrap_samples = 200;
  std::uint64_t seed = 7;
};

struct IrbResult {
  DecayFit reference;
  DecayFit interleaved;
  double f_clifford = 0.0;
  double f_gate = 0.0;
  double f_clifford_sigma = 0.0;
  double f_gate_sigma = 0.0;
  double f_gate_low = 0.0;   // 2.5th percentile of the bootstrap
  double f_gate_high = 0.0;  // 97.5th percentile
  bool unphysical = false;   // f_gate > 1
  bool converged = false;
  int bootstrap_samples = 0;
};

/// Fits both decays, forms the fidelities, and bootstraps their uncertainty by resampling
/// circuits within each length and then binomial counts within each circuit.
IrbResult fit_and_extract(const RBDataset& reference, const RBDataset& interleaved, const IrbOptions& options = {});

}  // namespace spincv

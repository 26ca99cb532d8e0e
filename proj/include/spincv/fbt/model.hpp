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

#include <vector>

#include <Eigen/Dense>

#include "spincv/device/readout.hpp"
#include "spincv/qcore/ptm.hpp"

namespace spincv {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FbtConfig {
  std::vector<GateKind> tracked{GateKind::X1_90, GateKind::X2_90, GateKind::CZ};
  double prior_sigma = 0.01;
  /// Pin row 0 of every error matrix to zero (trace preservation).
  bool tp_prior = true;
  /// Linearize each circuit around the current posterior mean instead of the ideal gates.
  bool relinearize = false;
  SpamParameters spam;
};

/// Noisy PTM of tracked gate g is G_g (I + Lambda_g); parameters are the row-major entries of
/// every Lambda_g, gate after gate.
class GateErrorModel {
 public:
  static constexpr int kBlock = 256;

  explicit GateErrorModel(FbtConfig config);

  const FbtConfig& config() const { return config_; }
  int gate_count() const { return static_cast<int>(config_.tracked.size()); }
  int parameter_count() const { return kBlock * gate_count(); }
  /// Position of a gate kind in the tracked list, -1 when untracked.
  int slot(GateKind kind) const;

  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::VectorXd& mean() { return mean_; }
  const RowMatrix& covariance() const { return cov_; }
  RowMatrix& covariance() { return cov_; }
  double covariance_trace() const { return cov_.trace(); }

  const PauliTransferMatrix& ideal(int gate) const { return ideal_.at(static_cast<std::size_t>(gate)); }
  Mat16 error_matrix(int gate) const;
  Mat16 error_matrix(int gate, const Eigen::VectorXd& params) const;
  PauliTransferMatrix noisy_ptm(int gate) const;

  /// Sigma *= factor (factor >= 1).
  void inflate(double factor);
  /// Symmetrize and clip negative eigenvalues at zero. Returns true when anything was clipped.
  bool repair_covariance();
  int repairs() const { return repairs_; }

 private:
  FbtConfig config_;
  std::vector<PauliTransferMatrix> ideal_;
  Eigen::VectorXd mean_;
  RowMatrix cov_;
  int repairs_ = 0;
};

struct SensitivityRow {
  /// Predicted survival at the linearization point.
  double p_point = 0.0;
  Eigen::VectorXd point;  // empty = ideal gates
  Eigen::VectorXd coefficients;

  /// First-order prediction for a parameter vector.
  double predict(const Eigen::VectorXd& params) const;
};

/// Survival = probability of the expected parity. Virtual Z gates are exact; every other gate must
/// be tracked by the model.
SensitivityRow linearize_circuit(const GateErrorModel& model, const Circuit& circuit, bool expected_odd,
                                 const Eigen::VectorXd* point = nullptr);

/// Exact (nonlinear) survival for a parameter vector.
double circuit_survival(const GateErrorModel& model, const Circuit& circuit, bool expected_odd,
                        const Eigen::VectorXd& params);

double observation_variance(double frequency, int shots);

/// Recursive least-squares update with one scalar survival frequency.
void bayes_update(GateErrorModel& model, const SensitivityRow& row, double observed_frequency, int shots);

/// Linearizes (around the mean when configured) and updates with a record's survival.
void update_from_record(GateErrorModel& model, const MeasurementRecord& record);

}  // namespace spincv

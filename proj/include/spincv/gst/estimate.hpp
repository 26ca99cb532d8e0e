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

#include <Eigen/Core>

#include "spincv/device/parameters.hpp"
#include "spincv/device/readout.hpp"
#include "spincv/gst/design.hpp"
#include "spincv/qcore/error_generator.hpp"

namespace spincv {

/// Markovian two-qubit gate set: one PTM per estimated primitive, a prepared
/// state and the even-parity effect. Virtual gates stay ideal.
struct GateSetModel {
  std::vector<PrimitiveGate> gates;
  std::vector<PauliTransferMatrix> ptms;
  Vec16 rho = Vec16::Zero();
  Vec16 effect = Vec16::Zero();

  static GateSetModel ideal(std::span<const PrimitiveGate> gates, const SpamParameters& spam = {});

  int index_of(const PrimitiveGate& g) const;  // -1 when absent
  /// Probability of the even outcome. Throws ValidationError on a gate outside the set.
  double even_probability(const Circuit& circuit) const;
  /// G -> T^-1 G T, rho -> T^-1 rho, E -> T^T E.
  GateSetModel gauge_transformed(const Mat16& t) const;
};

/// Observed even-parity frequencies with their shot weights.
struct GSTData {
  std::vector<Circuit> circuits;
  std::vector<double> frequency;
  std::vector<double> shots;
};

/// Aggregates records by circuit.
GSTData data_from_records(std::span<const MeasurementRecord> records);
/// Exact model probabilities carried with a nominal weight.
GSTData exact_data(const GateSetModel& truth, std::span<const Circuit> circuits, double weight = 1e6);
/// Binomial samples of the model probabilities.
GSTData sampled_data(const GateSetModel& truth, std::span<const Circuit> circuits, int shots, std::uint64_t seed);

/// Binomial deviance 2 sum N [f ln(f/p) + (1-f) ln((1-f)/(1-p))] over a
/// trace-preserving parametrisation: rows 1..15 of every gate PTM, the 15
/// non-identity state components and all 16 effect components.
class GSTObjective {
 public:
  GSTObjective(std::vector<PrimitiveGate> gates, const GSTData& data);

  int dimension() const { return dimension_; }
  Eigen::VectorXd pack(const GateSetModel& model) const;
  GateSetModel unpack(const Eigen::VectorXd& x) const;
  double deviance(const Eigen::VectorXd& x, Eigen::VectorXd* gradient = nullptr) const;
  /// sum N [f ln p + (1-f) ln(1-p)].
  double log_likelihood(const Eigen::VectorXd& x) const;
  /// Log-likelihood of the model that reproduces every frequency exactly.
  double saturated_log_likelihood() const;

  using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  /// Predicted even probabilities and, optionally, d p / d x (circuits x parameters).
  void probabilities(const Eigen::VectorXd& x, Eigen::VectorXd& p, Jacobian* jacobian) const;
  /// Per-circuit deviance slope and curvature with respect to p.
  void deviance_weights(const Eigen::VectorXd& p, Eigen::VectorXd& slope, Eigen::VectorXd& weight) const;

 private:
  double accumulate(const Eigen::VectorXd& x, Eigen::VectorXd* gradient, bool saturated_offset) const;

  std::vector<PrimitiveGate> gates_;
  std::vector<Mat16> fixed_;  // ideal PTMs of the virtual gates that occur
  std::vector<std::vector<int>> ops_;
  std::vector<double> freq_, shots_;
  int dimension_ = 0;
};

enum class GaugeGroup { Full, Unitary };

struct EstimateOptions {
  int max_iterations = 5000;
  double tolerance = 1e-10;  // relative log-likelihood change
  GaugeGroup gauge = GaugeGroup::Full;
  bool cptp = true;
};

struct GateEstimate {
  PrimitiveGate gate;
  PauliTransferMatrix ptm;
  ErrorGeneratorDecomposition generator;
  bool generator_defined = true;
  double average_fidelity = 0.0;
  /// Per-qubit fidelity of the channel reduced with the other qubit maximally
  /// mixed; NaN when the reduced ideal is not unitary.
  std::array<double, 2> marginal_fidelity{};
};

struct GSTEstimate {
  GateSetModel lgst;
  GateSetModel model;  // after MLE, gauge fixing and projection
  std::vector<GateEstimate> gates;
  std::vector<double> deviance_history;  // one entry per accepted MLE iteration
  double deviance = 0.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool mle_failed = false;  // model falls back to the linear-inversion estimate

  const GateEstimate& gate(const PrimitiveGate& g) const;
};

/// Linear inversion in the gauge of the ideal preparation fiducials.
GateSetModel linear_inversion(const GSTDesign& design, const GSTData& data);

/// Gauge transformation that brings `model` closest (Frobenius) to the ideal
/// gate set, state and effect. Gauges must commute with the virtual Z frames:
/// Full spans all such trace-preserving maps, Unitary the diagonal unitaries.
Mat16 optimal_gauge(const GateSetModel& model, GaugeGroup group);

GSTEstimate estimate(const GSTDesign& design, const GSTData& data, const EstimateOptions& options = {});

}  // namespace spincv

namespace spincv {

/// Same as estimate(design, data) from persisted records. Throws
/// ValidationError when a design circuit has no shots.
GSTEstimate estimate(const GSTDesign& design, std::span<const MeasurementRecord> records,
                     const EstimateOptions& options = {});

}  // namespace spincv

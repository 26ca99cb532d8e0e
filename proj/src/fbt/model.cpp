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

#include "spincv/fbt/model.hpp"

#include <cmath>
#include <iostream>
#include <map>

#include "spincv/common/errors.hpp"
#include "spincv/kernels/kernels.hpp"

namespace spincv {

GateErrorModel::GateErrorModel(FbtConfig config) : config_(std::move(config)) {
  if (config_.tracked.empty()) throw ValidationError("GateErrorModel: no tracked gates");
  if (!(config_.prior_sigma > 0.0)) throw ValidationError("GateErrorModel: prior_sigma must be > 0");
  for (std::size_t i = 0; i < config_.tracked.size(); ++i) {
    const GateKind k = config_.tracked[i];
    if (is_virtual(k) || k == GateKind::Idle) throw ValidationError("GateErrorModel: cannot track a virtual or idle gate");
    for (std::size_t j = 0; j < i; ++j)
      if (config_.tracked[j] == k) throw ValidationError("GateErrorModel: duplicate tracked gate");
    ideal_.push_back(ptm_from_unitary(ideal_unitary(PrimitiveGate::of(k))));
  }
  const int n = parameter_count();
  mean_ = Eigen::VectorXd::Zero(n);
  cov_ = RowMatrix::Zero(n, n);
  const double var = config_.prior_sigma * config_.prior_sigma;
  for (int i = 0; i < n; ++i) {
    const bool row0 = (i % kBlock) < 16;
    cov_(i, i) = (config_.tp_prior && row0) ? 0.0 : var;
  }
}

int GateErrorModel::slot(GateKind kind) const {
  for (int i = 0; i < gate_count(); ++i)
    if (config_.tracked[static_cast<std::size_t>(i)] == kind) return i;
  return -1;
}

Mat16 GateErrorModel::error_matrix(int gate, const Eigen::VectorXd& params) const {
  Mat16 l;
  for (int k = 0; k < kBlock; ++k) l(k / 16, k % 16) = params(gate * kBlock + k);
  return l;
}

Mat16 GateErrorModel::error_matrix(int gate) const { return error_matrix(gate, mean_); }

PauliTransferMatrix GateErrorModel::noisy_ptm(int gate) const {
  return PauliTransferMatrix(Mat16(ideal(gate).matrix() * (Mat16::Identity() + error_matrix(gate))));
}

void GateErrorModel::inflate(double factor) {
  if (!(factor >= 1.0)) throw ValidationError("GateErrorModel::inflate: factor must be >= 1");
  cov_ *= factor;
}

bool GateErrorModel::repair_covariance() {
  const RowMatrix sym = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues();
  const bool clipped = ev.minCoeff() < 0.0;
  if (clipped) {
    ev = ev.cwiseMax(0.0);
    cov_ = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    ++repairs_;
    std::clog << "fbt: covariance repaired (min eigenvalue " << es.eigenvalues().minCoeff() << ")\n";
  } else {
    cov_ = sym;
  }
  return clipped;
}

double SensitivityRow::predict(const Eigen::VectorXd& params) const {
  if (point.size() == 0) return p_point + coefficients.dot(params);
  return p_point + coefficients.dot(params - point);
}

namespace {

class VirtualCache {
 public:
  const Mat16& get(const PrimitiveGate& g) {
    const auto key = std::make_pair(static_cast<int>(g.kind), g.angle);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, ptm_from_unitary(ideal_unitary(g)).matrix()).first;
    return it->second;
  }

 private:
  std::map<std::pair<int, double>, Mat16> cache_;
};

struct Step {
  int gate = -1;      // tracked slot, -1 for virtual
  const Mat16* matrix = nullptr;  // full PTM at the evaluation point
};

std::vector<Step> resolve(const GateErrorModel& model, const Circuit& circuit, const Eigen::VectorXd* point,
                          VirtualCache& vz, std::vector<Mat16>& noisy) {
  noisy.resize(static_cast<std::size_t>(model.gate_count()));
  for (int g = 0; g < model.gate_count(); ++g)
    noisy[static_cast<std::size_t>(g)] =
        point ? Mat16(model.ideal(g).matrix() * (Mat16::Identity() + model.error_matrix(g, *point)))
              : model.ideal(g).matrix();
  std::vector<Step> steps;
  steps.reserve(circuit.size());
  for (const auto& g : circuit) {
    if (is_virtual(g.kind)) {
      steps.push_back({-1, &vz.get(g)});
      continue;
    }
    const int s = model.slot(g.kind);
    if (s < 0) throw ValidationError("fbt: circuit contains untracked gate " + std::string(gate_kind_name(g.kind)));
    steps.push_back({s, &noisy[static_cast<std::size_t>(s)]});
  }
  return steps;
}

}  // namespace

SensitivityRow linearize_circuit(const GateErrorModel& model, const Circuit& circuit, bool expected_odd,
                                 const Eigen::VectorXd* point) {
  VirtualCache vz;
  std::vector<Mat16> noisy;
  const auto steps = resolve(model, circuit, point, vz, noisy);
  const auto& spam = model.config().spam;

  std::vector<Vec16> before(steps.size());
  Vec16 w = initial_state(spam).pauli_vector();
  for (std::size_t k = 0; k < steps.size(); ++k) {
    before[k] = w;
    w = *steps[k].matrix * w;
  }
  const Vec16 effect = even_effect_vector(spam);
  const double p_even = effect.dot(w);
  const double sign = expected_odd ? -1.0 : 1.0;

  SensitivityRow row;
  row.p_point = expected_odd ? 1.0 - p_even : p_even;
  if (point) row.point = *point;
  row.coefficients = Eigen::VectorXd::Zero(model.parameter_count());
  Vec16 u = effect;  // row vector e^T L_k, stored as a column
  for (std::size_t k = steps.size(); k-- > 0;) {
    const int g = steps[k].gate;
    if (g >= 0) {
      // d/dLambda[a][b] of u^T G (I + Lambda) w_k = (G^T u)_a (w_k)_b
      const Vec16 left = model.ideal(g).matrix().transpose() * u;
      double* c = row.coefficients.data() + g * GateErrorModel::kBlock;
      for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) c[a * 16 + b] += sign * left(a) * before[k](b);
    }
    u = steps[k].matrix->transpose() * u;
  }
  return row;
}

double circuit_survival(const GateErrorModel& model, const Circuit& circuit, bool expected_odd,
                        const Eigen::VectorXd& params) {
  if (params.size() != model.parameter_count()) throw ValidationError("circuit_survival: parameter size mismatch");
  VirtualCache vz;
  std::vector<Mat16> noisy;
  const auto steps = resolve(model, circuit, &params, vz, noisy);
  Vec16 w = initial_state(model.config().spam).pauli_vector();
  for (const auto& s : steps) w = *s.matrix * w;
  const double p_even = even_effect_vector(model.config().spam).dot(w);
  return expected_odd ? 1.0 - p_even : p_even;
}

double observation_variance(double f, int shots) {
  if (shots < 1) throw ValidationError("observation_variance: shots must be >= 1");
  const double n = shots;
  return std::max(f * (1.0 - f) / n, 1.0 / (4.0 * n * n));
}

void bayes_update(GateErrorModel& model, const SensitivityRow& row, double f, int shots) {
  const auto n = static_cast<std::size_t>(model.parameter_count());
  if (static_cast<std::size_t>(row.coefficients.size()) != n) throw ValidationError("bayes_update: row size mismatch");
  if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("bayes_update: frequency must lie in [0, 1]");
  const double r = observation_variance(f, shots);
  if (row.coefficients.cwiseAbs().maxCoeff() == 0.0) return;

  const auto& k = kernels::active();
  RowMatrix& cov = model.covariance();
  Eigen::VectorXd s(static_cast<Eigen::Index>(n));
  k.gemv(cov.data(), n, row.coefficients.data(), s.data(), n, n);
  const double denom = k.dot(row.coefficients.data(), s.data(), n) + r;
  const double innovation = f - row.predict(model.mean());
  k.axpy(innovation / denom, s.data(), model.mean().data(), n);
  k.ger(-1.0 / denom, s.data(), s.data(), cov.data(), n, n, n);

  for (std::size_t i = 0; i < n; ++i)
    if (cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) < 0.0) {
      model.repair_covariance();
      break;
    }
}

void update_from_record(GateErrorModel& model, const MeasurementRecord& record) {
  const bool around_mean = model.config().relinearize;
  const SensitivityRow row =
      linearize_circuit(model, record.circuit, record.expected_odd, around_mean ? &model.mean() : nullptr);
  const int survived = record.expected_odd ? record.odd_count : record.even_count;
  bayes_update(model, row, static_cast<double>(survived) / record.shots, record.shots);
}

}  // namespace spincv

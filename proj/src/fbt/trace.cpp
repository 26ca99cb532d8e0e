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

#include "spincv/fbt/trace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spincv/common/errors.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/qcore/cptp.hpp"
#include "spincv/qcore/fidelity.hpp"

namespace spincv {

namespace {

double quantile(std::vector<double>& v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double projected_fidelity(const Mat16& ptm, const PauliTransferMatrix& ideal, const SummaryOptions& o) {
  PauliTransferMatrix m(ptm);
  if (!cptp_check(m).is_cptp(1e-12)) m = cptp_project(m, o.projection_tol, o.projection_iterations).ptm;
  return fidelity_metrics(m, ideal).average_gate_fidelity;
}

}  // namespace

GateFidelitySummary summarize_gate(const GateErrorModel& model, int gate, Rng& rng, const SummaryOptions& options) {
  if (gate < 0 || gate >= model.gate_count()) throw ValidationError("summarize_gate: gate out of range");
  if (options.samples < 2) throw ValidationError("summarize_gate: need at least 2 samples");
  constexpr int n = GateErrorModel::kBlock;
  const int off = gate * n;
  const Eigen::MatrixXd block = model.covariance().block(off, off, n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (block + block.transpose()));
  const Eigen::MatrixXd factor = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const Eigen::VectorXd mu = model.mean().segment(off, n);
  const Mat16& g = model.ideal(gate).matrix();

  GateFidelitySummary s;
  s.gate = model.config().tracked[static_cast<std::size_t>(gate)];
  s.f_mean = projected_fidelity(model.noisy_ptm(gate).matrix(), model.ideal(gate), options);
  std::vector<double> f(static_cast<std::size_t>(options.samples));
  Eigen::VectorXd z(n);
  for (auto& fi : f) {
    for (int i = 0; i < n; ++i) z(i) = standard_normal(rng);
    const Eigen::VectorXd x = mu + factor * z;
    Mat16 l;
    for (int k = 0; k < n; ++k) l(k / 16, k % 16) = x(k);
    fi = projected_fidelity(Mat16(g * (Mat16::Identity() + l)), model.ideal(gate), options);
  }
  s.f_low = quantile(f, 0.025);
  s.f_median = quantile(f, 0.5);
  s.f_high = quantile(f, 0.975);
  return s;
}

std::vector<PosteriorSnapshot> fidelity_trace(GateErrorModel& model, std::span<const MeasurementRecord> stream,
                                              const TraceOptions& options) {
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (stream[i].lab_time < stream[i - 1].lab_time)
      throw ValidationError("fidelity_trace: records must be ordered by lab time");
  if (options.window_seconds <= 0.0 && options.window_circuits < 1)
    throw ValidationError("fidelity_trace: window must be positive");

  std::vector<int> report;
  if (options.report.empty()) {
    for (int g = 0; g < model.gate_count(); ++g) report.push_back(g);
  } else {
    for (GateKind k : options.report) {
      const int g = model.slot(k);
      if (g < 0) throw ValidationError("fidelity_trace: reported gate is not tracked");
      report.push_back(g);
    }
  }

  const GateErrorModel prior = model;
  std::vector<PosteriorSnapshot> out;
  std::size_t i = 0;
  int window = 0;
  const double t0 = stream.empty() ? 0.0 : stream.front().lab_time;
  while (i < stream.size()) {
    std::size_t end = i;
    if (options.window_seconds > 0.0) {
      const double stop = t0 + (std::floor((stream[i].lab_time - t0) / options.window_seconds) + 1.0) *
                                   options.window_seconds;
      while (end < stream.size() && stream[end].lab_time < stop) ++end;
    } else {
      end = std::min(stream.size(), i + static_cast<std::size_t>(options.window_circuits));
    }
    if (window > 0) {
      if (options.reprior)
        model = prior;
      else if (options.inflation > 1.0)
        model.inflate(options.inflation);
    }
    for (std::size_t k = i; k < end; ++k) update_from_record(model, stream[k]);

    PosteriorSnapshot snap;
    snap.window = window;
    snap.circuits = static_cast<int>(end - i);
    snap.lab_time = stream[end - 1].lab_time;
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(window)));
    for (int g : report) snap.gates.push_back(summarize_gate(model, g, rng, options.summary));
    out.push_back(std::move(snap));
    ++window;
    i = end;
  }
  return out;
}

std::string snapshot_csv(std::span<const PosteriorSnapshot> snapshots) {
  std::ostringstream os;
  os.precision(10);
  os << "lab_time,gate,F_median,F_low,F_high\n";
  for (const auto& s : snapshots)
    for (const auto& g : s.gates)
      os << s.lab_time << ',' << gate_kind_name(g.gate) << ',' << g.f_median << ',' << g.f_low << ',' << g.f_high
         << '\n';
  return os.str();
}

}  // namespace spincv

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

#include "spincv/irb/rb.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "spincv/common/errors.hpp"
#include "spincv/common/parallel.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {

std::vector<std::string> RBConfig::validation_errors() const {
  std::vector<std::string> errors;
  if (lengths.empty()) errors.emplace_back("lengths: must not be empty");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 1) errors.push_back("lengths[" + std::to_string(i) + "]: must be >= 1");
    if (i > 0 && lengths[i] <= lengths[i - 1]) errors.push_back("lengths: must be strictly increasing");
  }
  if (randomizations < 2) errors.emplace_back("randomizations: must be >= 2");
  if (shots < 1) errors.emplace_back("shots: must be >= 1");
  return errors;
}

void RBConfig::validate() const {
  const auto errors = validation_errors();
  if (errors.empty()) return;
  std::string msg = "invalid RB configuration:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ValidationError(msg);
}

int target_element(Entangler gate) {
  const auto& group = CliffordGroup::standard();
  const int e = group.find(ideal_unitary(PrimitiveGate::of(entangler_kind(gate))));
  if (e < 0) throw ValidationError("target_element: gate is not a Clifford");
  return e;
}

std::vector<RBCircuit> generate_rb_circuits(const RBConfig& config) {
  config.validate();
  const auto& compiler = CliffordCompiler::standard(config.entangler);
  const auto& group = compiler.group();
  const int target = config.interleaved_gate ? target_element(*config.interleaved_gate) : -1;
  const PrimitiveGate target_gate =
      config.interleaved_gate ? PrimitiveGate::of(entangler_kind(*config.interleaved_gate)) : PrimitiveGate{};

  std::vector<RBCircuit> out;
  out.reserve(config.lengths.size() * static_cast<std::size_t>(config.randomizations));
  std::uint64_t counter = 0;
  for (int m : config.lengths) {
    for (int r = 0; r < config.randomizations; ++r) {
      Rng rng(derive_seed(config.seed, counter++));
      std::uniform_int_distribution<int> pick(0, group.size() - 1);
      RBCircuit c;
      c.length = m;
      c.randomization = r;
      c.target = target;
      c.cliffords.resize(static_cast<std::size_t>(m));
      std::vector<int> applied;
      applied.reserve(static_cast<std::size_t>(2 * m));
      for (int k = 0; k < m; ++k) {
        const int e = pick(rng);
        c.cliffords[static_cast<std::size_t>(k)] = e;
        const auto& seq = compiler.compile(e).sequence;
        c.circuit.insert(c.circuit.end(), seq.begin(), seq.end());
        applied.push_back(e);
        if (target >= 0) {
          c.circuit.push_back(target_gate);
          applied.push_back(target);
        }
      }
      PauliString final_pauli;
      if (config.random_final_pauli) final_pauli = PauliString(std::uniform_int_distribution<int>(0, 15)(rng));
      const Recovery rec = recovery_gate(group, applied, final_pauli);
      c.recovery = rec.element;
      c.expected_odd = rec.expected_odd;
      const auto& seq = compiler.compile(rec.element).sequence;
      c.circuit.insert(c.circuit.end(), seq.begin(), seq.end());
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

bool drift_free(const DeviceParameters& p) {
  return p.drift.heating_amplitude1 == 0.0 && p.drift.heating_amplitude2 == 0.0 && p.drift.walk_sigma == 0.0 &&
         p.drift.exchange_drift_rate == 0.0;
}

void label(MeasurementRecord& rec, const RBCircuit& c, std::string_view series, long id) {
  rec.series = std::string(series);
  rec.length = c.length;
  rec.expected_odd = c.expected_odd;
  rec.context_id = id;
}

}  // namespace

std::vector<MeasurementRecord> run_rb(const DeviceParameters& params, std::span<const RBCircuit> circuits, int shots,
                                     std::uint64_t seed, ContextState& context, const SimulationOptions& options,
                                     std::string_view series) {
  if (shots < 1) throw ValidationError("run_rb: shots must be >= 1");
  std::vector<MeasurementRecord> out(circuits.size());
  if (!drift_free(params)) {
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      out[i] = run_circuit(params, circuits[i].circuit, shots, derive_seed(seed, i), context, options);
      label(out[i], circuits[i], series, static_cast<long>(i));
    }
    return out;
  }
  const ContextState start = context;
  parallel_for(circuits.size(), [&](std::size_t i) {
    ContextState local = start;
    out[i] = run_circuit(params, circuits[i].circuit, shots, derive_seed(seed, i), local, options);
    label(out[i], circuits[i], series, static_cast<long>(i));
  });
  double lab = 0.0, mw = 0.0;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const Circuit expanded = expand_composites(circuits[i].circuit);
    out[i].lab_time = start.lab_time + lab;
    lab += shots * (circuit_duration(params, expanded) + params.readout_time);
    mw += shots * circuit_mw_time(params, expanded);
  }
  Rng rng(derive_seed(seed, circuits.size()));
  context = advance_context(start, params, mw, lab, rng);
  return out;
}

double RBDataset::mean_survival(std::size_t i) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < survived[i].size(); ++k) sum += static_cast<double>(survived[i][k]) / shots[i][k];
  return sum / static_cast<double>(survived[i].size());
}

double RBDataset::standard_error(std::size_t i) const {
  const std::size_t n = survived[i].size();
  if (n < 2) return 0.0;
  const double mean = mean_survival(i);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = static_cast<double>(survived[i][k]) / shots[i][k] - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

std::vector<double> RBDataset::mean_survivals() const {
  std::vector<double> out(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) out[i] = mean_survival(i);
  return out;
}

RBDataset dataset_from_records(std::span<const MeasurementRecord> records, std::string_view series) {
  std::map<int, std::size_t> slot;
  for (const auto& r : records)
    if (r.series == series) slot.emplace(r.length, 0);
  RBDataset d;
  for (auto& [m, i] : slot) {
    i = d.lengths.size();
    d.lengths.push_back(m);
  }
  d.survived.resize(d.lengths.size());
  d.shots.resize(d.lengths.size());
  for (const auto& r : records) {
    if (r.series != series) continue;
    const std::size_t i = slot.at(r.length);
    d.survived[i].push_back(r.expected_odd ? r.odd_count : r.even_count);
    d.shots[i].push_back(r.shots);
  }
  return d;
}

std::string decay_csv(const RBDataset& data) {
  std::ostringstream os;
  os.precision(10);
  os << "length,mean_survival,stderr\n";
  for (std::size_t i = 0; i < data.lengths.size(); ++i)
    os << data.lengths[i] << ',' << data.mean_survival(i) << ',' << data.standard_error(i) << '\n';
  return os.str();
}

}  // namespace spincv

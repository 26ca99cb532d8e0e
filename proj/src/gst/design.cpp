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

#include "spincv/gst/design.hpp"

#include <set>

#include <Eigen/SVD>

#include "spincv/device/readout.hpp"

namespace spincv {

namespace {

constexpr double kRankTol = 1e-6;

int numerical_rank(const std::vector<Vec16>& vs) {
  if (vs.empty()) return 0;
  Eigen::MatrixXd m(16, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > kRankTol * s(0);
  return r;
}

Vec16 prepared(const Circuit& f) { return ideal_circuit_ptm(f).apply(DensityMatrix::computational(0).pauli_vector()); }

std::pair<Vec16, Vec16> pulled_back(const Circuit& f) {
  const Mat16 m = ideal_circuit_ptm(f).matrix();
  const Vec16 even = even_effect_vector({});
  Vec16 id = Vec16::Zero();
  id(0) = 2.0;
  return {m.transpose() * even, m.transpose() * (id - even)};
}

Circuit concat(std::initializer_list<const Circuit*> parts) {
  Circuit c;
  for (const auto* p : parts) c.insert(c.end(), p->begin(), p->end());
  return c;
}

std::vector<Circuit> local_fiducials() {
  std::vector<Circuit> out;
  const auto f1 = single_qubit_fiducials(0), f2 = single_qubit_fiducials(1);
  // Order by total word length so that greedy selection prefers short fiducials.
  std::vector<std::pair<std::size_t, Circuit>> all;
  for (const auto& a : f1)
    for (const auto& b : f2) all.emplace_back(a.size() + b.size(), concat({&a, &b}));
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [n, c] : all) out.push_back(std::move(c));
  return out;
}

// Controlled rotation that carries qubit q's Z onto the parity: X_q, entangler, X_q^3.
Circuit projection(int q, const PrimitiveGate& entangler) {
  const PrimitiveGate x = PrimitiveGate::of(q == 0 ? GateKind::X1_90 : GateKind::X2_90);
  return {x, entangler, x, x, x};
}

template <class Make>
std::vector<Circuit> greedy(const std::vector<Circuit>& candidates, Make vectors, int& rank) {
  std::vector<Circuit> chosen;
  std::vector<Vec16> span;
  rank = 0;
  for (const auto& c : candidates) {
    auto trial = span;
    for (const Vec16& v : vectors(c)) trial.push_back(v);
    const int r = numerical_rank(trial);
    if (r > rank || chosen.empty()) {
      rank = r;
      span = std::move(trial);
      chosen.push_back(c);
      if (rank == 16) break;
    }
  }
  return chosen;
}

std::string key(const Circuit& c) { return to_string(c); }

}  // namespace

PauliTransferMatrix ideal_circuit_ptm(const Circuit& circuit) {
  return ptm_from_unitary(ideal_unitary(std::span<const PrimitiveGate>(circuit)));
}

int preparation_rank(std::span<const Circuit> fiducials) {
  std::vector<Vec16> vs;
  for (const auto& f : fiducials) vs.push_back(prepared(f));
  return numerical_rank(vs);
}

int measurement_rank(std::span<const Circuit> fiducials) {
  std::vector<Vec16> vs;
  for (const auto& f : fiducials) {
    const auto [e, o] = pulled_back(f);
    vs.push_back(e);
    vs.push_back(o);
  }
  return numerical_rank(vs);
}

std::vector<Circuit> single_qubit_fiducials(int qubit) {
  const PrimitiveGate x = PrimitiveGate::of(qubit == 0 ? GateKind::X1_90 : GateKind::X2_90);
  const PrimitiveGate zm = qubit == 0 ? PrimitiveGate::vz1(-kPi / 2) : PrimitiveGate::vz2(-kPi / 2);
  const PrimitiveGate zp = qubit == 0 ? PrimitiveGate::vz1(kPi / 2) : PrimitiveGate::vz2(kPi / 2);
  return {{}, {x}, {x, x}, {x, x, x}, {zm, x, zp}, {zm, x, x, x, zp}};
}

GSTDesign design_experiment(std::span<const PrimitiveGate> gates, int max_depth, FiducialStrategy strategy) {
  if (max_depth < 1) throw ValidationError("design_experiment: max_depth must be >= 1");
  const PrimitiveGate* entangler = nullptr;
  bool has_x1 = false, has_x2 = false;
  for (const auto& g : gates) {
    if (is_virtual(g.kind)) throw ValidationError("design_experiment: virtual gates are not estimated");
    has_x1 |= g.kind == GateKind::X1_90;
    has_x2 |= g.kind == GateKind::X2_90;
    if (g.kind == GateKind::CZ || g.kind == GateKind::DCZ) entangler = entangler ? entangler : &g;
  }
  if (!has_x1 || !has_x2 || !entangler)
    throw ValidationError("design_experiment: gate set must include X1_90, X2_90 and an entangling gate");

  GSTDesign d;
  d.gates.assign(gates.begin(), gates.end());

  std::vector<Circuit> prep_candidates, meas_candidates;
  const Circuit empty;
  if (strategy == FiducialStrategy::None) {
    prep_candidates = meas_candidates = {empty};
  } else {
    const std::vector<Circuit> local = local_fiducials();
    const Circuit e{*entangler};
    std::vector<Circuit> entangled;
    for (const auto& after : local)
      for (const auto& before : local) entangled.push_back(concat({&before, &e, &after}));
    prep_candidates = local;
    prep_candidates.insert(prep_candidates.end(), entangled.begin(), entangled.end());
    meas_candidates = local;
    if (strategy == FiducialStrategy::ParityNative) {
      meas_candidates.insert(meas_candidates.end(), entangled.begin(), entangled.end());
    } else {
      for (int q = 0; q < 2; ++q) {
        const Circuit proj = projection(q, *entangler);
        for (const auto& before : local) meas_candidates.push_back(concat({&before, &proj}));
      }
    }
  }
  d.prep_fiducials = greedy(prep_candidates, [](const Circuit& c) { return std::vector<Vec16>{prepared(c)}; },
                            d.prep_rank);
  d.meas_fiducials = greedy(meas_candidates, [](const Circuit& c) {
    const auto [e, o] = pulled_back(c);
    return std::vector<Vec16>{e, o};
  }, d.meas_rank);
  if (d.prep_rank < 16 || d.meas_rank < 16)
    throw DesignFailure("design_experiment: fiducials reach preparation rank " + std::to_string(d.prep_rank) +
                            " and measurement rank " + std::to_string(d.meas_rank) + " (16 required)",
                        d.prep_rank, d.meas_rank);

  for (const auto& g : gates) d.germs.push_back({g});
  for (std::size_t i = 0; i < gates.size(); ++i)
    for (std::size_t j = i + 1; j < gates.size(); ++j) d.germs.push_back({gates[i], gates[j]});
  // X followed by a quarter-turn frame change ties each drive axis to the
  // virtual Z frames; without it only the frame-commuting gauge is fixed.
  d.germs.push_back({PrimitiveGate::of(GateKind::X1_90), PrimitiveGate::vz1(kPi / 2)});
  d.germs.push_back({PrimitiveGate::of(GateKind::X2_90), PrimitiveGate::vz2(kPi / 2)});
  for (int depth = 1; depth <= max_depth; depth *= 2) d.depths.push_back(depth);

  std::set<std::string> seen;
  auto add = [&](Circuit c) {
    if (seen.insert(key(c)).second) d.circuits.push_back(std::move(c));
  };
  for (const auto& f : d.prep_fiducials)
    for (const auto& m : d.meas_fiducials) add(concat({&f, &m}));
  for (const auto& germ : d.germs)
    for (int depth : d.depths) {
      Circuit power;
      for (int r = 0; r < depth; ++r) power.insert(power.end(), germ.begin(), germ.end());
      for (const auto& f : d.prep_fiducials)
        for (const auto& m : d.meas_fiducials) add(concat({&f, &power, &m}));
    }
  return d;
}

}  // namespace spincv

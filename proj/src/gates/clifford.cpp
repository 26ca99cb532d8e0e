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

#include "spincv/gates/clifford.hpp"

#include <deque>

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

constexpr int kKeyPaulis[4] = {4, 12, 1, 3};  // XI, ZI, IX, IZ

std::uint8_t signed_image(const PauliMap& m, int p, bool negate) {
  return static_cast<std::uint8_t>(m[p] ^ (negate ? 0x10 : 0x00));
}

}  // namespace

PauliMap pauli_map_from_unitary(const Mat4c& u) {
  const auto& paulis = pauli_matrices();
  PauliMap m{};
  for (int p = 0; p < 16; ++p) {
    const Mat4c image = u * paulis[p] * u.adjoint();
    int found = -1;
    bool negative = false;
    for (int q = 0; q < 16 && found < 0; ++q) {
      const Complex c = (paulis[q] * image).trace() / 4.0;
      if (std::abs(std::abs(c) - 1.0) < 1e-8) {
        if (std::abs(c.imag()) > 1e-8) break;
        found = q;
        negative = c.real() < 0.0;
      }
    }
    if (found < 0 || (image - (negative ? -1.0 : 1.0) * paulis[found]).cwiseAbs().maxCoeff() > 1e-8)
      throw ValidationError("unitary is not a Clifford: a Pauli is not mapped to a signed Pauli");
    m[p] = static_cast<std::uint8_t>(found | (negative ? 0x10 : 0x00));
  }
  return m;
}

PauliMap compose_maps(const PauliMap& a, const PauliMap& b) {
  PauliMap out{};
  for (int p = 0; p < 16; ++p) out[p] = signed_image(a, b[p] & 0x0f, (b[p] & 0x10) != 0);
  return out;
}

std::uint32_t canonical_key(const PauliMap& m) {
  std::uint32_t key = 0;
  for (int k = 0; k < 4; ++k) key |= static_cast<std::uint32_t>(m[kKeyPaulis[k]]) << (5 * k);
  return key;
}

CliffordGroup::CliffordGroup(std::span<const Mat4c> generators) : lookup_(1u << 20, -1) {
  if (generators.empty()) throw ValidationError("Clifford group needs at least one generator");
  std::vector<PauliMap> gen_maps;
  for (const auto& g : generators) gen_maps.push_back(pauli_map_from_unitary(g));

  const PauliMap id = pauli_map_from_unitary(Mat4c::Identity());
  maps_.push_back(id);
  unitaries_.push_back(Mat4c::Identity());
  lookup_[canonical_key(id)] = 0;
  for (std::size_t head = 0; head < maps_.size(); ++head) {
    for (std::size_t g = 0; g < gen_maps.size(); ++g) {
      const PauliMap next = compose_maps(gen_maps[g], maps_[head]);
      auto& slot = lookup_[canonical_key(next)];
      if (slot >= 0) continue;
      slot = static_cast<std::int32_t>(maps_.size());
      maps_.push_back(next);
      unitaries_.push_back(generators[g] * unitaries_[head]);
    }
  }

  inverses_.resize(maps_.size());
  for (std::size_t e = 0; e < maps_.size(); ++e) {
    PauliMap inv{};
    for (int p = 0; p < 16; ++p) inv[maps_[e][p] & 0x0f] = static_cast<std::uint8_t>(p | (maps_[e][p] & 0x10));
    inverses_[e] = find(inv);
  }
}

const CliffordGroup& CliffordGroup::standard() {
  static const CliffordGroup group = [] {
    const std::array<Mat4c, 5> gens = {
        ideal_unitary(PrimitiveGate::of(GateKind::X1_90)), ideal_unitary(PrimitiveGate::of(GateKind::X2_90)),
        ideal_unitary(PrimitiveGate::vz1(kPi / 2)), ideal_unitary(PrimitiveGate::vz2(kPi / 2)),
        ideal_unitary(PrimitiveGate::of(GateKind::CZ))};
    return CliffordGroup(gens);
  }();
  return group;
}

int CliffordGroup::product(int a, int b) const { return find(compose_maps(maps_.at(a), maps_.at(b))); }

int CliffordGroup::find(const PauliMap& m) const { return lookup_[canonical_key(m)]; }

int CliffordGroup::find(const Mat4c& u) const {
  PauliMap m;
  try {
    m = pauli_map_from_unitary(u);
  } catch (const ValidationError&) {
    return -1;
  }
  return find(m);
}

Recovery recovery_gate(const CliffordGroup& group, std::span<const int> sequence, PauliString final_pauli) {
  if (sequence.empty()) throw ValidationError("recovery_gate: empty sequence");
  int total = group.identity();
  for (int g : sequence) total = group.product(g, total);
  const int target = group.find(final_pauli.matrix());
  Recovery r;
  r.element = group.product(target, group.inverse(total));
  const bool flip1 = final_pauli.first() == 1 || final_pauli.first() == 2;
  const bool flip2 = final_pauli.second() == 1 || final_pauli.second() == 2;
  r.expected_odd = flip1 != flip2;
  return r;
}

}  // namespace spincv

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

#include <doctest.h>

#include <chrono>
#include <random>
#include <set>

#include "spincv/common/errors.hpp"
#include "spincv/gates/compiler.hpp"
#include "spincv/qcore/ptm.hpp"

using namespace spincv;

namespace {

double parity_odd_probability(const Mat4c& u) {
  const Eigen::Vector4cd psi = u.col(0);
  return std::norm(psi(1)) + std::norm(psi(2));
}

}  // namespace

TEST_CASE("gate tokens round-trip") {
  const Circuit c = {PrimitiveGate::of(GateKind::X1_90), PrimitiveGate::vz2(-kPi / 2), PrimitiveGate::idle(1.25e-6),
                     PrimitiveGate::of(GateKind::DCZ), PrimitiveGate::of(GateKind::DCZ_half),
                     PrimitiveGate::of(GateKind::XEcho), PrimitiveGate::of(GateKind::CZ), PrimitiveGate::vz1(0.1)};
  CHECK(parse_circuit(to_string(c)) == c);
  CHECK(to_string(c).starts_with("X1 Z2:"));
  CHECK_THROWS_AS(from_token("Y1"), ValidationError);
  CHECK_THROWS_AS(from_token("ID:-1"), ValidationError);
  CHECK_THROWS_AS(from_token("Z1:abc"), ValidationError);
}

TEST_CASE("ideal gate unitaries") {
  Mat4c cz = Mat4c::Identity();
  cz(3, 3) = -1;
  CHECK(equal_up_to_phase(ideal_unitary(PrimitiveGate::of(GateKind::CZ)), cz));
  // Two half pulses around the echo give exp(-i pi/4 ZZ) behind XX; the frame
  // corrections turn it into (X (x) X) CZ.
  const Mat4c xx = PauliString::from_label("XX").matrix();
  CHECK(equal_up_to_phase(ideal_unitary(PrimitiveGate::of(GateKind::DCZ)), xx * cz));
  CHECK(equal_up_to_phase(ideal_unitary(dcz_expansion()), ideal_unitary(PrimitiveGate::of(GateKind::DCZ))));
  for (int k = 0; k < kGateKindCount; ++k) CHECK(is_unitary(ideal_unitary(PrimitiveGate{static_cast<GateKind>(k), 0.3, 1e-6})));
}

TEST_CASE("Clifford group closure has order 11520") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& g = CliffordGroup::standard();
  CHECK(g.size() == 11520);
  CHECK(g.find(Mat4c::Identity()) == g.identity());
  std::set<std::uint32_t> keys;
  for (int e = 0; e < g.size(); ++e) {
    keys.insert(canonical_key(g.map(e)));
    CHECK(g.find(g.unitary(e)) == e);
  }
  CHECK(keys.size() == 11520u);
  MESSAGE("group build seconds: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

TEST_CASE("group axioms on random elements") {
  const auto& g = CliffordGroup::standard();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  for (int i = 0; i < 100; ++i) {
    const int a = pick(rng);
    CHECK(g.product(a, g.inverse(a)) == g.identity());
    CHECK(g.product(g.inverse(a), a) == g.identity());
  }
  for (int i = 0; i < 1000; ++i) {
    const int a = pick(rng), b = pick(rng);
    const int ab = g.product(a, b);
    REQUIRE(ab >= 0);
    CHECK(ab == g.find(Mat4c(g.unitary(a) * g.unitary(b))));
  }
}

TEST_CASE("non-Clifford generator is rejected") {
  Mat4c t = Mat4c::Identity();
  t(1, 1) = std::exp(Complex(0, kPi / 4));
  t(3, 3) = std::exp(Complex(0, kPi / 4));
  const std::array<Mat4c, 1> gens{t};
  CHECK_THROWS_AS(CliffordGroup{gens}, ValidationError);
}

TEST_CASE("compilation round-trips every element for both entanglers") {
  const auto& g = CliffordGroup::standard();
  for (Entangler e : {Entangler::CZ, Entangler::DCZ}) {
    CAPTURE(entangler_name(e));
    const auto& comp = CliffordCompiler::standard(e);
    int failures = 0;
    std::array<int, 4> classes{};
    for (int k = 0; k < g.size(); ++k) {
      const auto& c = comp.compile(k);
      if (!equal_up_to_phase(c.ideal_unitary, g.unitary(k), 1e-9)) ++failures;
      if (!equal_up_to_phase(ideal_unitary(c.sequence), g.unitary(k), 1e-9)) ++failures;
      REQUIRE(c.entangler_count <= 3);
      ++classes[c.entangler_count];
      for (const auto& gate : c.sequence)
        CHECK((gate.kind == entangler_kind(e) || gate.kind == GateKind::X1_90 || gate.kind == GateKind::X2_90 ||
               is_virtual(gate.kind)));
    }
    CHECK(failures == 0);
    CHECK(classes == std::array<int, 4>{576, 5184, 5184, 576});
    const double mean = comp.mean_tracked_count();
    MESSAGE("mean tracked primitives per Clifford: " << mean);
    CHECK(mean > 1.0);
    CHECK(mean < 12.0);
    const auto hist = comp.tracked_count_histogram();
    int total = 0;
    for (int h : hist) total += h;
    CHECK(total == 11520);
  }
}

TEST_CASE("identity and CZ compile to their direct forms") {
  const auto& g = CliffordGroup::standard();
  const auto& comp = CliffordCompiler::standard(Entangler::CZ);
  CHECK(comp.compile(g.identity()).sequence.empty());
  const auto& cz = comp.compile(g.find(ideal_unitary(PrimitiveGate::of(GateKind::CZ))));
  CHECK(cz.tracked_count == 1);
  CHECK(cz.entangler_count == 1);
  const auto& dcomp = CliffordCompiler::standard(Entangler::DCZ);
  const auto& dcz = dcomp.compile(g.find(ideal_unitary(PrimitiveGate::of(GateKind::DCZ))));
  CHECK(dcz.tracked_count == 1);
}

TEST_CASE("recovery gate inverts sequences") {
  const auto& g = CliffordGroup::standard();
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  const int a = pick(rng);
  const std::array<int, 1> single{a};
  CHECK(recovery_gate(g, single).element == g.inverse(a));
  CHECK_FALSE(recovery_gate(g, single).expected_odd);
  CHECK_THROWS_AS(recovery_gate(g, std::span<const int>{}), ValidationError);

  std::vector<int> seq(20);
  for (auto& s : seq) s = pick(rng);
  const auto r = recovery_gate(g, seq);
  // Conjugation-table oracle: the full product maps every Pauli to itself.
  PauliMap total = g.map(g.identity());
  for (int s : seq) total = compose_maps(g.map(s), total);
  total = compose_maps(g.map(r.element), total);
  for (int p = 0; p < 16; ++p) CHECK(total[p] == p);
}

TEST_CASE("predicted parity matches noiseless simulation of compiled circuits") {
  const auto& g = CliffordGroup::standard();
  const auto& comp = CliffordCompiler::standard(Entangler::DCZ);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pick(0, g.size() - 1), len(1, 12);
  std::bernoulli_distribution coin(0.5);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> seq(len(rng));
    for (auto& s : seq) s = pick(rng);
    const PauliString final_pauli = coin(rng) ? PauliString::from_label("XI") : PauliString();
    const auto r = recovery_gate(g, seq, final_pauli);
    Circuit circuit;
    for (int s : seq) {
      const auto& c = comp.compile(s).sequence;
      circuit.insert(circuit.end(), c.begin(), c.end());
    }
    const auto& rc = comp.compile(r.element).sequence;
    circuit.insert(circuit.end(), rc.begin(), rc.end());
    const double p_odd = parity_odd_probability(ideal_unitary(circuit));
    if (std::abs(p_odd - (r.expected_odd ? 1.0 : 0.0)) > 1e-9) ++mismatches;
  }
  CHECK(mismatches == 0);
}

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

#include "spincv/gates/compiler.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

struct Cost {
  int x = 0;
  int z = 0;
  friend bool operator<(const Cost& a, const Cost& b) { return std::pair(a.x, a.z) < std::pair(b.x, b.z); }
  friend Cost operator+(const Cost& a, const Cost& b) { return {a.x + b.x, a.z + b.z}; }
};

struct Word {
  Circuit gates;
  Cost cost;
};

// Minimal single-qubit words Z(a) [X Z(b) [X Z(c)]] reaching each of the 24
// single-qubit Cliffords on the given qubit, keyed by group element.
std::map<int, Word> single_qubit_words(const CliffordGroup& group, int qubit) {
  const double angles[4] = {0.0, kPi / 2, kPi, -kPi / 2};
  const GateKind x = qubit == 0 ? GateKind::X1_90 : GateKind::X2_90;
  auto vz = [&](double a) { return qubit == 0 ? PrimitiveGate::vz1(a) : PrimitiveGate::vz2(a); };
  std::map<int, Word> best;
  for (int nx = 0; nx <= 2; ++nx) {
    const int nz = nx + 1;
    int combos = 1;
    for (int k = 0; k < nz; ++k) combos *= 4;
    for (int code = 0; code < combos; ++code) {
      Word w;
      int c = code;
      for (int k = 0; k < nz; ++k) {
        const double a = angles[c % 4];
        c /= 4;
        if (k > 0) {
          w.gates.push_back(PrimitiveGate::of(x));
          ++w.cost.x;
        }
        if (a != 0.0) {
          w.gates.push_back(vz(a));
          ++w.cost.z;
        }
      }
      const int e = group.find(ideal_unitary(w.gates));
      if (e < 0) throw std::logic_error("single-qubit word outside the group");
      auto it = best.find(e);
      if (it == best.end() || w.cost < it->second.cost) best[e] = std::move(w);
    }
  }
  if (best.size() != 24) throw std::logic_error("single-qubit words do not cover 24 Cliffords");
  return best;
}

}  // namespace

CliffordCompiler::CliffordCompiler(const CliffordGroup& group, Entangler entangler)
    : group_(&group), entangler_(entangler) {
  const int n = group.size();
  const PrimitiveGate ent = PrimitiveGate::of(entangler_kind(entangler));
  const int e_element = group.find(ideal_unitary(ent));
  if (e_element < 0) throw ValidationError("entangler is not an element of the Clifford group");

  // Local layer: qubit-1 word followed by qubit-2 word (they commute).
  std::vector<int> local_elements;
  std::vector<Word> local_words;
  const auto w1 = single_qubit_words(group, 0);
  const auto w2 = single_qubit_words(group, 1);
  for (const auto& [e1, a] : w1)
    for (const auto& [e2, b] : w2) {
      Word w;
      w.gates = a.gates;
      w.gates.insert(w.gates.end(), b.gates.begin(), b.gates.end());
      w.cost = a.cost + b.cost;
      local_elements.push_back(group.product(e1, e2));
      local_words.push_back(std::move(w));
    }

  constexpr int kUnset = -1;
  std::vector<int> level(n, kUnset);
  std::vector<Cost> cost(n);
  std::vector<int> last_local(n, -1), previous(n, -1);
  std::vector<std::vector<int>> levels(1);
  for (std::size_t l = 0; l < local_elements.size(); ++l) {
    const int e = local_elements[l];
    if (level[e] == kUnset || local_words[l].cost < cost[e]) {
      if (level[e] == kUnset) levels[0].push_back(e);
      level[e] = 0;
      cost[e] = local_words[l].cost;
      last_local[e] = static_cast<int>(l);
    }
  }
  int reached = static_cast<int>(levels[0].size());
  for (int k = 1; reached < n; ++k) {
    if (k > 4) throw std::logic_error("Clifford compilation did not close within four entanglers");
    levels.emplace_back();
    std::sort(levels[k - 1].begin(), levels[k - 1].end());
    for (int g : levels[k - 1]) {
      const int eg = group.product(e_element, g);
      for (std::size_t l = 0; l < local_elements.size(); ++l) {
        const int h = group.product(local_elements[l], eg);
        if (level[h] != kUnset && level[h] < k) continue;
        const Cost c = cost[g] + local_words[l].cost;
        if (level[h] == kUnset) {
          levels[k].push_back(h);
          ++reached;
        } else if (!(c < cost[h])) {
          continue;
        }
        level[h] = k;
        cost[h] = c;
        last_local[h] = static_cast<int>(l);
        previous[h] = g;
      }
    }
  }

  compiled_.resize(n);
  for (int e = 0; e < n; ++e) {
    std::vector<int> chain;
    for (int cur = e; cur >= 0; cur = previous[cur]) chain.push_back(cur);
    CompiledClifford& c = compiled_[e];
    c.index = e;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (it != chain.rbegin()) {
        c.sequence.push_back(ent);
        ++c.entangler_count;
      }
      const auto& w = local_words[last_local[*it]].gates;
      c.sequence.insert(c.sequence.end(), w.begin(), w.end());
    }
    c.ideal_unitary = ideal_unitary(c.sequence);
    c.tracked_count = static_cast<int>(
        std::count_if(c.sequence.begin(), c.sequence.end(), [](const PrimitiveGate& g) { return is_tracked(g.kind); }));
  }
}

const CliffordCompiler& CliffordCompiler::standard(Entangler entangler) {
  static const CliffordCompiler cz(CliffordGroup::standard(), Entangler::CZ);
  static const CliffordCompiler dcz(CliffordGroup::standard(), Entangler::DCZ);
  return entangler == Entangler::CZ ? cz : dcz;
}

double CliffordCompiler::mean_tracked_count() const {
  double total = 0.0;
  for (const auto& c : compiled_) total += c.tracked_count;
  return total / static_cast<double>(compiled_.size());
}

std::vector<int> CliffordCompiler::tracked_count_histogram() const {
  std::vector<int> h;
  for (const auto& c : compiled_) {
    if (static_cast<int>(h.size()) <= c.tracked_count) h.resize(c.tracked_count + 1, 0);
    ++h[c.tracked_count];
  }
  return h;
}

}  // namespace spincv

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

#include "spincv/gates/clifford.hpp"

namespace spincv {

struct CompiledClifford {
  int index = 0;
  Circuit sequence;  // time order, X_90 / virtual-Z / entangler only
  Mat4c ideal_unitary = Mat4c::Identity();
  int tracked_count = 0;
  int entangler_count = 0;
};

/// Decomposes every group element into local layers of X_90 and virtual-Z
/// separated by entangling gates. Minimizes the entangler count first, then
/// X_90 count, then virtual-Z count. Up to three entanglers are needed (the
/// SWAP-like class).
class CliffordCompiler {
 public:
  CliffordCompiler(const CliffordGroup& group, Entangler entangler);

  /// Shared compilers over CliffordGroup::standard().
  static const CliffordCompiler& standard(Entangler entangler);

  const CliffordGroup& group() const { return *group_; }
  Entangler entangler() const { return entangler_; }
  const CompiledClifford& compile(int element) const { return compiled_.at(element); }

  double mean_tracked_count() const;
  /// histogram[k] = number of elements whose compilation has k tracked gates.
  std::vector<int> tracked_count_histogram() const;

 private:
  const CliffordGroup* group_;
  Entangler entangler_;
  std::vector<CompiledClifford> compiled_;
};

}  // namespace spincv

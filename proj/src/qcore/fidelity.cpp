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

#include "spincv/qcore/fidelity.hpp"

#include "spincv/common/errors.hpp"

namespace spincv {

FidelityMetrics fidelity_metrics(const PauliTransferMatrix& actual,
                                 const PauliTransferMatrix& ideal) {
  if (!ideal.is_orthogonal(1e-9))
    throw ValidationError("fidelity_metrics: ideal channel is not unitary-derived");
  const double process = ideal.matrix().cwiseProduct(actual.matrix()).sum() / 16.0;
  return {process, average_from_process(process)};
}

}  // namespace spincv

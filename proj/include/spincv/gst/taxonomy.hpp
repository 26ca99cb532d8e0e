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

#include <span>
#include <string>
#include <vector>

#include "spincv/gst/estimate.hpp"

namespace spincv {

enum class ErrorCategory { Dephasing, Physical, Calibration, Other };

std::string_view category_name(ErrorCategory c);

struct TaxonomyEntry {
  PrimitiveGate gate;
  ErrorCategory category = ErrorCategory::Other;
  char type = 'h';  // 'h' Hamiltonian, 's' stochastic
  PauliString pauli;
  double value = 0.0;
  std::string attribution;
};

struct TaxonomyOptions {
  double threshold = 1e-4;  // |coefficient| below this is not reported
};

/// Rule for one coefficient; no thresholding.
TaxonomyEntry classify(const PrimitiveGate& gate, char type, PauliString pauli, double value);

/// Entries above threshold, grouped by category, largest magnitude first.
std::vector<TaxonomyEntry> taxonomy_report(std::span<const GateEstimate> gates, const TaxonomyOptions& options = {});
std::vector<TaxonomyEntry> taxonomy_report(const GSTEstimate& estimate, const TaxonomyOptions& options = {});

/// Header: gate,category,type,pauli,value,attribution
std::string taxonomy_csv(std::span<const TaxonomyEntry> entries);
/// Human-readable table grouped by category.
std::string taxonomy_text(std::span<const TaxonomyEntry> entries);

}  // namespace spincv

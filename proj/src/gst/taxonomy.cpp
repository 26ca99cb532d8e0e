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

#include "spincv/gst/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace spincv {

namespace {

bool is_entangling(GateKind k) { return k == GateKind::CZ || k == GateKind::DCZ || k == GateKind::DCZ_half; }

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Dephasing: return "dephasing";
    case ErrorCategory::Physical: return "physical";
    case ErrorCategory::Calibration: return "calibration";
    case ErrorCategory::Other: return "other";
  }
  return "other";
}

TaxonomyEntry classify(const PrimitiveGate& gate, char type, PauliString pauli, double value) {
  TaxonomyEntry e{gate, ErrorCategory::Other, type, pauli, value, ""};
  const std::string label = pauli.label();
  const bool z_only = label == "IZ" || label == "ZI" || label == "ZZ";
  if (type == 's') {
    if (z_only) {
      e.category = ErrorCategory::Dephasing;
      e.attribution = "dephasing";
    }
    return e;
  }
  const GateKind k = gate.kind;
  if (is_entangling(k)) {
    if (label == "IZ" || label == "ZI") {
      e.category = ErrorCategory::Physical;
      e.attribution = "Stark shift";
    } else if (label == "ZZ") {
      e.category = ErrorCategory::Calibration;
      e.attribution = "exchange level";
    }
    return e;
  }
  const bool x1 = k == GateKind::X1_90, x2 = k == GateKind::X2_90;
  if ((x1 && label == "XI") || (x2 && label == "IX")) {
    e.category = ErrorCategory::Calibration;
    e.attribution = "over/under-rotation";
  } else if ((x1 && label == "IX") || (x2 && label == "XI")) {
    e.category = ErrorCategory::Physical;
    e.attribution = "off-resonant driving";
  } else if (label == "ZZ") {
    e.category = ErrorCategory::Physical;
    e.attribution = "residual exchange";
  }
  return e;
}

std::vector<TaxonomyEntry> taxonomy_report(std::span<const GateEstimate> gates, const TaxonomyOptions& options) {
  std::vector<TaxonomyEntry> out;
  for (const auto& g : gates) {
    if (!g.generator_defined) continue;
    for (int i = 0; i < 15; ++i) {
      const PauliString p(i + 1);
      const double h = g.generator.hamiltonian[static_cast<std::size_t>(i)];
      const double s = g.generator.stochastic[static_cast<std::size_t>(i)];
      if (std::abs(h) > options.threshold) out.push_back(classify(g.gate, 'h', p, h));
      if (std::abs(s) > options.threshold) out.push_back(classify(g.gate, 's', p, s));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const TaxonomyEntry& a, const TaxonomyEntry& b) {
    if (a.category != b.category) return a.category < b.category;
    return std::abs(a.value) > std::abs(b.value);
  });
  return out;
}

std::vector<TaxonomyEntry> taxonomy_report(const GSTEstimate& estimate, const TaxonomyOptions& options) {
  return taxonomy_report(std::span<const GateEstimate>(estimate.gates), options);
}

std::string taxonomy_csv(std::span<const TaxonomyEntry> entries) {
  std::ostringstream os;
  os << "gate,category,type,pauli,value,attribution\n";
  for (const auto& e : entries)
    os << to_token(e.gate) << ',' << category_name(e.category) << ',' << e.type << ',' << e.pauli.label() << ','
       << format_value(e.value) << ',' << e.attribution << '\n';
  return os.str();
}

std::string taxonomy_text(std::span<const TaxonomyEntry> entries) {
  std::ostringstream os;
  if (entries.empty()) return "no error generators above threshold\n";
  for (ErrorCategory c : {ErrorCategory::Dephasing, ErrorCategory::Physical, ErrorCategory::Calibration,
                          ErrorCategory::Other}) {
    bool header = false;
    for (const auto& e : entries) {
      if (e.category != c) continue;
      if (!header) {
        os << category_name(c) << ":\n";
        header = true;
      }
      os << "  " << to_token(e.gate) << "  " << e.type << '_' << e.pauli.label() << " = " << format_value(e.value);
      if (!e.attribution.empty()) os << "  (" << e.attribution << ')';
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace spincv

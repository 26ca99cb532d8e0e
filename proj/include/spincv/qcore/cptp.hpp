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

#include "spincv/qcore/ptm.hpp"

namespace spincv {

/// Choi matrix with trace 4: J = (1/4) sum_ab M[a][b] P_b^T (x) P_a.
/// The map M -> J is an isometry in the Frobenius norm.
Mat16c choi_from_ptm(const PauliTransferMatrix& m);
PauliTransferMatrix ptm_from_choi(const Mat16c& choi);

struct CptpCheck {
  bool is_tp = false;
  double min_choi_eigenvalue = 0.0;

  bool is_cp(double tol = 1e-9) const { return min_choi_eigenvalue >= -tol; }
  bool is_cptp(double tol = 1e-9) const { return is_tp && is_cp(tol); }
};

CptpCheck cptp_check(const PauliTransferMatrix& m);

struct CptpProjection {
  PauliTransferMatrix ptm;
  int iterations = 0;
  bool converged = false;
  /// Frobenius distance between the input and the projection.
  double distance = 0.0;
};

/// Nearest CPTP map by Dykstra alternating projections between the TP affine
/// set and the CP cone. Stops when successive iterates differ by < tol.
CptpProjection cptp_project(const PauliTransferMatrix& m, double tol = 1e-10, int max_iterations = 20000);

}  // namespace spincv

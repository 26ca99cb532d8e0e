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

#include <string>
#include <string_view>
#include <vector>

namespace spincv {

struct DriftParameters {
  double heating_amplitude1 = 0.0;  // Hz, signed saturating Larmor shift
  double heating_amplitude2 = 0.0;  // Hz
  double heating_tau = 1e-3;        // s of cumulative microwave on-time
  double cooldown_tau = 1e-3;       // s of microwave-free lab time
  double walk_sigma = 0.0;          // Hz per sqrt(s) of lab time
  double exchange_drift_rate = 0.0; // fractional change of J_on per s of lab time
};

struct SpamParameters {
  double init_error = 0.0;         // probability of starting in an odd-parity state
  double readout_flip_even = 0.0;  // P(report odd | even)
  double readout_flip_odd = 0.0;   // P(report even | odd)
};

struct DeviceParameters {
  std::string name = "custom";
  double f1 = 16.0e9;  // Hz
  double f2 = 15.98e9; // Hz
  double rabi1 = 1.0e6;
  double rabi2 = 1.0e6;
  double j_off = 100.0;   // Hz
  double j_slope = 10.0;  // decades per volt
  double v_range = 0.4;   // V
  double v_on = 0.4;      // V, exchange-gate level during CZ / DCZ pulses
  double stark_coeff = 0.0;  // Hz per V of exchange-gate pulse
  double t2star1 = 20e-6;
  double t2star2 = 20e-6;
  double t2hahn1 = 100e-6;
  double t2hahn2 = 100e-6;
  double j_sigma = 0.0;
  double readout_time = 100e-6;  // s of lab time per shot spent outside the circuit
  DriftParameters drift;
  SpamParameters spam;

  /// Every violated invariant, one message each; empty when valid.
  std::vector<std::string> validation_errors() const;
  /// Throws ValidationError listing all violations.
  void validate() const;

  double delta_ez() const { return f1 - f2; }
  double j_on() const;
  double x90_duration(int qubit) const;
  double echo_duration() const;
  double cz_duration() const;
  double dcz_half_duration() const;
};

/// J(v) = j_off * 10^(j_slope * v) for v in [0, v_range].
double exchange_from_voltage(const DeviceParameters& params, double v);

/// Built-in presets: "A", "B", "C", "drift-demo", "degradation".
DeviceParameters device_preset(std::string_view id);
std::vector<std::string> preset_names();

}  // namespace spincv

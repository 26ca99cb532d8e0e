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

#include "spincv/device/parameters.hpp"

#include <algorithm>
#include <cmath>

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

void require(std::vector<std::string>& errors, bool ok, std::string message) {
  if (!ok) errors.push_back(std::move(message));
}

bool positive(double x) { return x > 0.0 && !std::isnan(x); }
bool probability(double x) { return x >= 0.0 && x < 1.0; }

}  // namespace

std::vector<std::string> DeviceParameters::validation_errors() const {
  std::vector<std::string> e;
  require(e, positive(f1), "f1 must be > 0 Hz");
  require(e, positive(f2), "f2 must be > 0 Hz");
  require(e, f1 != f2, "f1 and f2 must differ (frequency addressing)");
  require(e, positive(rabi1), "rabi1 must be > 0 Hz");
  require(e, positive(rabi2), "rabi2 must be > 0 Hz");
  require(e, positive(j_off), "j_off must be > 0 Hz");
  require(e, j_slope >= 0.0, "j_slope must be >= 0 decades/V");
  require(e, positive(v_range), "v_range must be > 0 V");
  require(e, v_on > 0.0 && v_on <= v_range, "v_on must lie in (0, v_range]");
  require(e, std::isfinite(stark_coeff), "stark_coeff must be finite");
  require(e, positive(t2star1), "t2star1 must be > 0 s");
  require(e, positive(t2star2), "t2star2 must be > 0 s");
  require(e, t2hahn1 >= t2star1, "t2hahn1 must be >= t2star1");
  require(e, t2hahn2 >= t2star2, "t2hahn2 must be >= t2star2");
  require(e, j_sigma >= 0.0, "j_sigma must be >= 0");
  require(e, readout_time >= 0.0, "readout_time must be >= 0 s");
  require(e, positive(drift.heating_tau), "drift.heating_tau must be > 0 s");
  require(e, positive(drift.cooldown_tau), "drift.cooldown_tau must be > 0 s");
  require(e, drift.walk_sigma >= 0.0, "drift.walk_sigma must be >= 0 Hz/sqrt(s)");
  require(e, std::isfinite(drift.heating_amplitude1), "drift.heating_amplitude1 must be finite");
  require(e, std::isfinite(drift.heating_amplitude2), "drift.heating_amplitude2 must be finite");
  require(e, std::isfinite(drift.exchange_drift_rate), "drift.exchange_drift_rate must be finite");
  require(e, probability(spam.init_error), "spam.init_error must be in [0, 1)");
  require(e, probability(spam.readout_flip_even), "spam.readout_flip_even must be in [0, 1)");
  require(e, probability(spam.readout_flip_odd), "spam.readout_flip_odd must be in [0, 1)");
  return e;
}

void DeviceParameters::validate() const {
  const auto errors = validation_errors();
  if (errors.empty()) return;
  std::string msg = "invalid device parameters:";
  for (const auto& s : errors) msg += "\n  " + s;
  throw ValidationError(msg);
}

double DeviceParameters::j_on() const { return exchange_from_voltage(*this, v_on); }

double DeviceParameters::x90_duration(int qubit) const { return 0.25 / (qubit == 0 ? rabi1 : rabi2); }

double DeviceParameters::echo_duration() const { return 0.5 / std::min(rabi1, rabi2); }

double DeviceParameters::cz_duration() const { return 0.5 / j_on(); }

double DeviceParameters::dcz_half_duration() const { return 0.25 / j_on(); }

double exchange_from_voltage(const DeviceParameters& params, double v) {
  if (!(v >= 0.0 && v <= params.v_range))
    throw ValidationError("exchange_from_voltage: voltage outside the [0, v_range] dynamic range");
  return params.j_off * std::pow(10.0, params.j_slope * v);
}

std::vector<std::string> preset_names() { return {"A", "B", "C", "drift-demo", "degradation"}; }

DeviceParameters device_preset(std::string_view id) {
  DeviceParameters p;
  p.j_off = 100.0;
  p.j_slope = 10.0;
  p.v_range = 0.4;
  p.v_on = 0.4;
  p.drift.heating_tau = 2e-3;
  p.drift.cooldown_tau = 5e-3;
  p.readout_time = 100e-6;
  if (id == "A") {
    p.name = "A";
    p.f1 = 16.020e9;
    p.f2 = 16.000e9;
    p.rabi1 = 0.8e6;
    p.rabi2 = 0.8e6;
    p.stark_coeff = 50e3;
    p.t2star1 = 12e-6;
    p.t2star2 = 10e-6;
    p.t2hahn1 = 80e-6;
    p.t2hahn2 = 70e-6;
    p.j_sigma = 0.01;
    p.spam = {0.01, 0.01, 0.01};
  } else if (id == "B") {
    p.name = "B";
    p.f1 = 16.025e9;
    p.f2 = 16.000e9;
    p.rabi1 = 0.8e6;
    p.rabi2 = 0.8e6;
    p.stark_coeff = 80e3;
    p.t2star1 = 5e-6;
    p.t2star2 = 5e-6;
    p.t2hahn1 = 1e-3;
    p.t2hahn2 = 1e-3;
    p.j_sigma = 0.065;
    p.spam = {0.01, 0.01, 0.01};
  } else if (id == "C") {
    p.name = "C";
    p.f1 = 16.040e9;
    p.f2 = 16.000e9;
    p.rabi1 = 1.0e6;
    p.rabi2 = 1.0e6;
    p.stark_coeff = 50e3;
    p.t2star1 = 30e-6;
    p.t2star2 = 30e-6;
    p.t2hahn1 = 350e-6;
    p.t2hahn2 = 350e-6;
    p.j_sigma = 0.005;
    p.spam = {0.01, 0.01, 0.01};
  } else if (id == "drift-demo") {
    p = device_preset("B");
    p.name = "drift-demo";
    p.drift.heating_amplitude1 = -60e3;
    p.drift.heating_amplitude2 = -20e3;
    p.drift.heating_tau = 1e-3;
    p.drift.cooldown_tau = 2e-3;
    p.drift.walk_sigma = 200.0;
  } else if (id == "degradation") {
    p = device_preset("B");
    p.name = "degradation";
    p.drift.exchange_drift_rate = 0.05;
  } else {
    throw ValidationError("unknown device preset '" + std::string(id) + "'");
  }
  return p;
}

}  // namespace spincv

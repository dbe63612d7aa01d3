// Copyright 2026 The acclab Authors
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

#include <string_view>
#include <utility>
#include <vector>

#include "acclab/plant.hpp"

namespace acclab {

enum class ActuatorMode { Throttle, Brake, Coast };
enum class ControlMode { CCS, ACC };

[[nodiscard]] std::string_view to_string(ActuatorMode m);
[[nodiscard]] std::string_view to_string(ControlMode m);

struct SwitchConfig {
  double h = 0.05 * kGravity;  ///< dead-zone half-width [m/s^2]
  double t_safety = 1.12;      ///< ACC exit distance multiplier
  double v_margin = 0.5;       ///< lead must be this much faster to leave ACC [m/s]
  /// (speed [m/s], natural deceleration [m/s^2]) with increasing speed.
  std::vector<std::pair<double, double>> coast_curve{
      {0.0, 0.0}, {5.0, -0.15}, {10.0, -0.3}, {20.0, -0.55}, {30.0, -0.9}};
  double v_set = 60.0 / 3.6;  ///< cruise set speed [m/s]
  double ccs_kp = 0.8;        ///< [1/s]
  double ccs_ki = 0.1;        ///< [1/s^2]
  double a_limit = 0.25 * kGravity;
  bool hold_in_dead_zone = false;  ///< keep the last actuator command instead of coasting

  void validate() const;
};

/// Natural deceleration with the throttle closed, interpolated on the curve.
[[nodiscard]] double coast_decel(double v, const SwitchConfig& cfg);

/// Throttle above coast + h, brake below coast - h, coast in between.
/// On an exact band edge the previous mode is kept if it was the adjacent one.
[[nodiscard]] ActuatorMode actuator_select(double a_des, double v, ActuatorMode prev, const SwitchConfig& cfg);

/// CCS -> ACC once d <= d_desire. ACC -> CCS once d > t_safety d_desire or
/// the lead is faster than the follower by more than v_margin; such a lead
/// also blocks the CCS -> ACC entry.
[[nodiscard]] ControlMode mode_select(double d, double d_desire, double v_f, double v_p, ControlMode prev,
                                      const SwitchConfig& cfg);

struct CcsState {
  double integ = 0.0;  ///< integral of speed error [m]
};

/// Cruise PI on v_set - v_f, clamped to +-a_limit with conditional integration.
[[nodiscard]] double ccs_control(double v_f, const SwitchConfig& cfg, CcsState& state, double sample_time);

}  // namespace acclab

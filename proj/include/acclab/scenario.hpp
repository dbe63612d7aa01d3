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

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acclab {

inline constexpr double kKph = 1.0 / 3.6;  // m/s per km/h

enum class ProfileKind { Sinusoid, CutIn, BrakeStop, StopGo, None };

[[nodiscard]] std::string_view to_string(ProfileKind k);
[[nodiscard]] ProfileKind parse_profile_kind(std::string_view s);

/// Preceding-vehicle script.
struct LeadProfile {
  ProfileKind kind = ProfileKind::Sinusoid;
  double v0 = 15.0;                                         ///< initial / mean lead speed [m/s]
  double amplitude = 3.0;                                   ///< sinusoid amplitude [m/s]
  double period = 20.0;                                     ///< sinusoid period [s]
  double t_event = 10.0;                                    ///< cut-in time or brake onset [s]
  double decel = 0.8;                                       ///< braking deceleration magnitude [m/s^2]
  double hold = 5.0;                                        ///< standstill time before restart [s]
  double accel = 1.0;                                       ///< restart acceleration [m/s^2]
  double cut_in_gap = 0.0;                                  ///< gap when the target appears; 0 picks 0.7 d_desire [m]
  double t_lost = std::numeric_limits<double>::infinity();  ///< target disappears [s]

  void validate() const;
};

/// Scripted lead speed, ignoring whether the target is in view.
[[nodiscard]] double lead_speed(const LeadProfile& p, double t);
/// Lead speed at t, or nothing when no target is in view.
[[nodiscard]] std::optional<double> profile_velocity(const LeadProfile& p, double t, double duration);
/// Lead acceleration at t (right derivative); 0 when no target.
[[nodiscard]] double profile_accel(const LeadProfile& p, double t);
[[nodiscard]] bool target_present(const LeadProfile& p, double t);

struct NoiseConfig {
  bool enabled = false;
  std::array<double, 3> meas_std{0.5, 0.2, 0.1};  ///< d_error, v_rel, a_f
  double process_std = 0.0;                       ///< lead acceleration noise [m/s^2]

  void validate() const;
};

struct Scenario {
  std::string name = "sinusoid";
  LeadProfile profile;
  double duration = 60.0;  ///< [s]
  double v_f0 = 15.0;      ///< follower initial speed [m/s]
  double gap0 = 0.0;       ///< initial gap; 0 picks the desired distance [m]
  double v_set = 15.0;     ///< cruise set speed [m/s]
  bool acc_only = false;   ///< bypass the CCS/ACC switch (pure gap regulation)
  NoiseConfig noise;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Built-in catalogue: sinusoid, cruise_{30,40,50,60}, cut_in_{30_40,40_30,50_40},
/// brake_stop_{30,40}, stop_go_{30,40}, target_lost_{30_40,40_50}.
[[nodiscard]] const std::vector<Scenario>& scenario_catalog();
[[nodiscard]] std::vector<std::string> scenario_names();
/// Throws InvalidParameter naming the valid options.
[[nodiscard]] Scenario find_scenario(std::string_view name);

}  // namespace acclab

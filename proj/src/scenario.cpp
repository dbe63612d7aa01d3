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

#include "acclab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acclab/errors.hpp"

namespace acclab {

std::string_view to_string(ProfileKind k)
{
  switch (k) {
    case ProfileKind::Sinusoid: return "sinusoid";
    case ProfileKind::CutIn: return "cut_in";
    case ProfileKind::BrakeStop: return "brake_stop";
    case ProfileKind::StopGo: return "stop_go";
    case ProfileKind::None: return "none";
  }
  return "?";
}

ProfileKind parse_profile_kind(std::string_view s)
{
  for (auto k :
       {ProfileKind::Sinusoid, ProfileKind::CutIn, ProfileKind::BrakeStop, ProfileKind::StopGo, ProfileKind::None}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidParameter("unknown profile '" + std::string(s) +
                         "' (valid: sinusoid, cut_in, brake_stop, stop_go, none)");
}

void LeadProfile::validate() const
{
  if (!(v0 >= 0.0)) throw InvalidParameter("lead speed must be non-negative");
  if (kind == ProfileKind::Sinusoid) {
    if (!(period > 0.0)) throw InvalidParameter("sinusoid period must be positive");
    if (!(amplitude >= 0.0 && amplitude <= v0)) throw InvalidParameter("sinusoid amplitude must be in [0, v0]");
  }
  if (!(t_event >= 0.0)) throw InvalidParameter("event time must be non-negative");
  if (!(decel > 0.0) || !(accel > 0.0)) throw InvalidParameter("lead decel/accel must be positive");
  if (!(hold >= 0.0)) throw InvalidParameter("hold time must be non-negative");
  if (!(cut_in_gap >= 0.0)) throw InvalidParameter("cut-in gap must be non-negative");
  if (!(t_lost >= 0.0)) throw InvalidParameter("target-lost time must be non-negative");
}

bool target_present(const LeadProfile& p, double t)
{
  if (p.kind == ProfileKind::None || t >= p.t_lost) return false;
  if (p.kind == ProfileKind::CutIn) return t >= p.t_event;
  return true;
}

double lead_speed(const LeadProfile& p, double t)
{
  switch (p.kind) {
    case ProfileKind::Sinusoid: return p.v0 + p.amplitude * std::sin(2.0 * std::numbers::pi * t / p.period);
    case ProfileKind::CutIn:
    case ProfileKind::None: return p.v0;
    case ProfileKind::BrakeStop:
    case ProfileKind::StopGo: {
      if (t <= p.t_event) return p.v0;
      const double t_stop = p.t_event + p.v0 / p.decel;
      if (t <= t_stop) return p.v0 - p.decel * (t - p.t_event);
      if (p.kind == ProfileKind::BrakeStop || t <= t_stop + p.hold) return 0.0;
      return std::min(p.v0, p.accel * (t - t_stop - p.hold));
    }
  }
  return p.v0;
}

std::optional<double> profile_velocity(const LeadProfile& p, double t, double duration)
{
  if (!(t >= 0.0) || !(t <= duration)) throw InvalidParameter("profile time outside [0, duration]");
  if (!target_present(p, t)) return std::nullopt;
  return lead_speed(p, t);
}

double profile_accel(const LeadProfile& p, double t)
{
  if (!target_present(p, t)) return 0.0;
  switch (p.kind) {
    case ProfileKind::Sinusoid: {
      const double w = 2.0 * std::numbers::pi / p.period;
      return p.amplitude * w * std::cos(w * t);
    }
    case ProfileKind::BrakeStop:
    case ProfileKind::StopGo: {
      const double t_stop = p.t_event + p.v0 / p.decel;
      if (t >= p.t_event && t < t_stop) return -p.decel;
      if (p.kind == ProfileKind::StopGo) {
        const double t_go = t_stop + p.hold;
        if (t >= t_go && t < t_go + p.v0 / p.accel) return p.accel;
      }
      return 0.0;
    }
    default: return 0.0;
  }
}

void NoiseConfig::validate() const
{
  for (double s : meas_std) {
    if (!(s >= 0.0)) throw InvalidParameter("noise standard deviations must be non-negative");
  }
  if (!(process_std >= 0.0)) throw InvalidParameter("noise standard deviations must be non-negative");
}

void Scenario::validate() const
{
  if (name.empty()) throw InvalidParameter("scenario needs a name");
  profile.validate();
  noise.validate();
  if (!(duration > 0.0)) throw InvalidParameter("scenario duration must be positive");
  if (!(v_f0 >= 0.0) || !(v_set >= 0.0)) throw InvalidParameter("scenario speeds must be non-negative");
  if (!(gap0 >= 0.0)) throw InvalidParameter("initial gap must be non-negative");
}

namespace {

Scenario make(std::string name, ProfileKind kind, double host_kph, double lead_kph, double duration)
{
  Scenario s;
  s.name = std::move(name);
  s.profile.kind = kind;
  s.profile.v0 = lead_kph * kKph;
  s.duration = duration;
  s.v_f0 = host_kph * kKph;
  s.v_set = host_kph * kKph;
  return s;
}

std::vector<Scenario> build_catalog()
{
  std::vector<Scenario> c;

  Scenario sin = make("sinusoid", ProfileKind::Sinusoid, 54.0, 54.0, 60.0);
  sin.acc_only = true;
  c.push_back(sin);

  for (int kph : {30, 40, 50, 60}) {
    c.push_back(make("cruise_" + std::to_string(kph), ProfileKind::None, kph, kph, 30.0));
  }
  for (auto [host, lead] : {std::pair{30, 40}, std::pair{40, 30}, std::pair{50, 40}}) {
    Scenario s =
        make("cut_in_" + std::to_string(host) + "_" + std::to_string(lead), ProfileKind::CutIn, host, lead, 40.0);
    s.profile.t_event = 5.0;
    c.push_back(s);
  }
  for (int kph : {30, 40}) {
    // the driver's set speed sits above the lead so CCS closes back in
    Scenario b = make("brake_stop_" + std::to_string(kph), ProfileKind::BrakeStop, kph, kph, 40.0);
    b.v_set = (kph + 10) * kKph;
    c.push_back(b);
    Scenario g = make("stop_go_" + std::to_string(kph), ProfileKind::StopGo, kph, kph, 60.0);
    g.v_set = (kph + 10) * kKph;
    c.push_back(g);
  }
  for (auto [follow, cruise] : {std::pair{30, 40}, std::pair{40, 50}}) {
    Scenario s = make("target_lost_" + std::to_string(follow) + "_" + std::to_string(cruise), ProfileKind::Sinusoid,
                      follow, follow, 40.0);
    // steady lead: a sinusoid with zero amplitude
    s.profile.amplitude = 0.0;
    s.profile.t_lost = 10.0;
    s.v_set = cruise * kKph;
    c.push_back(s);
  }
  return c;
}

}  // namespace

const std::vector<Scenario>& scenario_catalog()
{
  static const std::vector<Scenario> catalog = build_catalog();
  return catalog;
}

std::vector<std::string> scenario_names()
{
  std::vector<std::string> names;
  for (const auto& s : scenario_catalog()) names.push_back(s.name);
  return names;
}

Scenario find_scenario(std::string_view name)
{
  for (const auto& s : scenario_catalog()) {
    if (s.name == name) return s;
  }
  std::string valid;
  for (const auto& n : scenario_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidParameter("unknown scenario '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace acclab

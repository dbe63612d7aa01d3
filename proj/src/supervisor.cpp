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

#include "acclab/supervisor.hpp"

#include <algorithm>
#include <cmath>

#include "acclab/errors.hpp"

namespace acclab {

std::string_view to_string(ActuatorMode m)
{
  switch (m) {
    case ActuatorMode::Throttle: return "throttle";
    case ActuatorMode::Brake: return "brake";
    case ActuatorMode::Coast: return "coast";
  }
  return "?";
}

std::string_view to_string(ControlMode m)
{
  return m == ControlMode::CCS ? "CCS" : "ACC";
}

void SwitchConfig::validate() const
{
  if (!(h > 0.0)) throw InvalidParameter("dead-zone half-width must be positive");
  if (!(t_safety > 1.0)) throw InvalidParameter("t_safety must exceed 1");
  if (!(v_margin >= 0.0)) throw InvalidParameter("v_margin must be non-negative");
  if (coast_curve.empty()) throw InvalidParameter("coast curve is empty");
  for (std::size_t i = 0; i < coast_curve.size(); ++i) {
    const auto [v, a] = coast_curve[i];
    if (!std::isfinite(v) || !std::isfinite(a) || v < 0.0 || a > 0.0) {
      throw InvalidParameter("coast curve points need v >= 0 and a <= 0");
    }
    if (i > 0 && !(v > coast_curve[i - 1].first && a <= coast_curve[i - 1].second)) {
      throw InvalidParameter("coast curve must be increasing in v and non-increasing in a");
    }
  }
  if (!(v_set >= 0.0)) throw InvalidParameter("v_set must be non-negative");
  if (!(ccs_kp >= 0.0) || !(ccs_ki >= 0.0)) throw InvalidParameter("cruise gains must be non-negative");
  if (!(a_limit > 0.0)) throw InvalidParameter("a_limit must be positive");
}

double coast_decel(double v, const SwitchConfig& cfg)
{
  if (!(v >= 0.0)) throw InvalidParameter("coast_decel needs a non-negative speed");
  const auto& c = cfg.coast_curve;
  if (v <= c.front().first) return c.front().second;
  if (v >= c.back().first) return c.back().second;
  const auto hi =
      std::upper_bound(c.begin(), c.end(), v, [](double x, const std::pair<double, double>& p) { return x < p.first; });
  const auto lo = hi - 1;
  const double s = (v - lo->first) / (hi->first - lo->first);
  return lo->second + s * (hi->second - lo->second);
}

ActuatorMode actuator_select(double a_des, double v, ActuatorMode prev, const SwitchConfig& cfg)
{
  const double a_ref = coast_decel(v, cfg);
  const double up = a_ref + cfg.h;
  const double down = a_ref - cfg.h;
  if (a_des > up) return ActuatorMode::Throttle;
  if (a_des < down) return ActuatorMode::Brake;
  if (a_des == up && prev == ActuatorMode::Throttle) return prev;
  if (a_des == down && prev == ActuatorMode::Brake) return prev;
  return ActuatorMode::Coast;
}

ControlMode mode_select(double d, double d_desire, double v_f, double v_p, ControlMode prev, const SwitchConfig& cfg)
{
  // a lead pulling away inside d_desire would otherwise bounce straight back out
  const bool pulling_away = v_p > v_f + cfg.v_margin;
  if (prev == ControlMode::CCS) return d <= d_desire && !pulling_away ? ControlMode::ACC : ControlMode::CCS;
  if (d > cfg.t_safety * d_desire || pulling_away) return ControlMode::CCS;
  return ControlMode::ACC;
}

double ccs_control(double v_f, const SwitchConfig& cfg, CcsState& state, double sample_time)
{
  const double e = cfg.v_set - v_f;
  const double base = cfg.ccs_kp * e;
  const double trial = state.integ + e * sample_time;
  const double u_trial = base + cfg.ccs_ki * trial;
  const bool winding = (u_trial > cfg.a_limit && e > 0.0) || (u_trial < -cfg.a_limit && e < 0.0);
  if (!winding) state.integ = trial;
  return std::clamp(base + cfg.ccs_ki * state.integ, -cfg.a_limit, cfg.a_limit);
}

}  // namespace acclab

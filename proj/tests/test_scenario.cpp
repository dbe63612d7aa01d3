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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "acclab/errors.hpp"

using acclab::LeadProfile;
using acclab::ProfileKind;

TEST(Profile, SinusoidAnchors)
{
  LeadProfile p;
  p.v0 = 15.0;
  p.amplitude = 3.0;
  p.period = 20.0;
  EXPECT_DOUBLE_EQ(*acclab::profile_velocity(p, 0.0, 60.0), 15.0);
  EXPECT_NEAR(*acclab::profile_velocity(p, 5.0, 60.0), 18.0, 1e-12);
  EXPECT_NEAR(*acclab::profile_velocity(p, 15.0, 60.0), 12.0, 1e-12);
  EXPECT_NEAR(acclab::profile_accel(p, 0.0), 3.0 * 2.0 * M_PI / 20.0, 1e-12);
}

TEST(Profile, BrakeStopKinematics)
{
  LeadProfile p;
  p.kind = ProfileKind::BrakeStop;
  p.v0 = 30.0 * acclab::kKph;
  p.decel = 2.0;
  p.t_event = 3.0;
  const double t_stop = 3.0 + p.v0 / 2.0;
  EXPECT_NEAR(t_stop - 3.0, 4.17, 5e-3);
  EXPECT_DOUBLE_EQ(acclab::lead_speed(p, 2.0), p.v0);
  EXPECT_NEAR(acclab::lead_speed(p, t_stop - 0.5), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(acclab::lead_speed(p, t_stop + 1e-9), 0.0);
  EXPECT_DOUBLE_EQ(acclab::lead_speed(p, 100.0), 0.0);
  EXPECT_DOUBLE_EQ(acclab::profile_accel(p, 4.0), -2.0);
  EXPECT_DOUBLE_EQ(acclab::profile_accel(p, t_stop + 1.0), 0.0);
}

TEST(Profile, StopGoRestarts)
{
  LeadProfile p;
  p.kind = ProfileKind::StopGo;
  p.v0 = 10.0;
  p.decel = 1.0;
  p.t_event = 0.0;
  p.hold = 5.0;
  p.accel = 2.0;
  EXPECT_DOUBLE_EQ(acclab::lead_speed(p, 12.0), 0.0);
  EXPECT_DOUBLE_EQ(acclab::lead_speed(p, 17.0), 4.0);
  EXPECT_DOUBLE_EQ(acclab::lead_speed(p, 40.0), 10.0);
  EXPECT_DOUBLE_EQ(acclab::profile_accel(p, 16.0), 2.0);
  EXPECT_DOUBLE_EQ(acclab::profile_accel(p, 21.0), 0.0);
}

TEST(Profile, AccelIsDerivativeOfSpeed)
{
  for (const auto& s : acclab::scenario_catalog()) {
    const double h = 1e-6;
    for (double t = 0.0137; t < s.duration - 1.0; t += 0.37) {
      if (!acclab::target_present(s.profile, t) || !acclab::target_present(s.profile, t + h)) continue;
      const double fd = (acclab::lead_speed(s.profile, t + h) - acclab::lead_speed(s.profile, t)) / h;
      EXPECT_NEAR(acclab::profile_accel(s.profile, t), fd, 1e-4) << s.name << " t=" << t;
    }
  }
}

TEST(Profile, TargetVisibility)
{
  LeadProfile cut;
  cut.kind = ProfileKind::CutIn;
  cut.t_event = 5.0;
  EXPECT_FALSE(acclab::profile_velocity(cut, 4.9, 40.0).has_value());
  EXPECT_TRUE(acclab::profile_velocity(cut, 5.0, 40.0).has_value());
  LeadProfile lost;
  lost.t_lost = 10.0;
  EXPECT_TRUE(acclab::target_present(lost, 9.99));
  EXPECT_FALSE(acclab::target_present(lost, 10.0));
  EXPECT_EQ(acclab::profile_accel(lost, 12.0), 0.0);
  LeadProfile none;
  none.kind = ProfileKind::None;
  EXPECT_FALSE(acclab::profile_velocity(none, 1.0, 10.0).has_value());
  EXPECT_THROW((void)acclab::profile_velocity(none, 11.0, 10.0), acclab::InvalidParameter);
  EXPECT_THROW((void)acclab::profile_velocity(none, -1.0, 10.0), acclab::InvalidParameter);
}

TEST(Profile, KindNamesRoundTrip)
{
  for (auto k :
       {ProfileKind::Sinusoid, ProfileKind::CutIn, ProfileKind::BrakeStop, ProfileKind::StopGo, ProfileKind::None}) {
    EXPECT_EQ(acclab::parse_profile_kind(acclab::to_string(k)), k);
  }
  EXPECT_THROW((void)acclab::parse_profile_kind("zigzag"), acclab::InvalidParameter);
}

TEST(Catalog, NamesUniqueAndValid)
{
  const auto names = acclab::scenario_names();
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  EXPECT_EQ(names.size(), 14u);
  for (const auto& s : acclab::scenario_catalog()) EXPECT_NO_THROW(s.validate()) << s.name;
  const auto cut = acclab::find_scenario("cut_in_30_40");
  EXPECT_DOUBLE_EQ(cut.v_f0, 30.0 / 3.6);
  EXPECT_DOUBLE_EQ(cut.profile.v0, 40.0 / 3.6);
  EXPECT_EQ(cut.profile.kind, ProfileKind::CutIn);
  EXPECT_THROW((void)acclab::find_scenario("nope"), acclab::InvalidParameter);
}

TEST(ScenarioTest, Validation)
{
  acclab::Scenario s;
  s.duration = 0.0;
  EXPECT_THROW(s.validate(), acclab::InvalidParameter);
  s = acclab::Scenario{};
  s.noise.meas_std[1] = -0.1;
  EXPECT_THROW(s.validate(), acclab::InvalidParameter);
  s = acclab::Scenario{};
  s.profile.amplitude = 20.0;
  EXPECT_THROW(s.validate(), acclab::InvalidParameter);
}

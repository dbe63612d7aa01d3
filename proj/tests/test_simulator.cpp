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

#include "acclab/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>

#include "acclab/errors.hpp"

using acclab::ControllerKind;
using acclab::Scenario;
using acclab::SimConfig;

namespace {

Scenario steady_lead(double duration, double speed = 20.0)
{
  Scenario s = acclab::find_scenario("sinusoid");
  s.profile.amplitude = 0.0;
  s.profile.v0 = speed;
  s.v_f0 = speed;
  s.v_set = speed;
  s.duration = duration;
  return s;
}

Scenario noisy_sinusoid(std::uint64_t seed)
{
  Scenario s = acclab::find_scenario("sinusoid");
  s.noise.enabled = true;
  s.seed = seed;
  return s;
}

std::string csv_of(const acclab::SimLog& log)
{
  std::ostringstream os;
  acclab::write_csv(os, log);
  return os.str();
}

// Power of a_f above f_lo, by direct DFT.
double high_band_power(const acclab::SimLog& log, double f_lo)
{
  const std::size_t n = log.size();
  const double T = log.sample_time;
  double power = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) / (static_cast<double>(n) * T);
    if (f <= f_lo) continue;
    std::complex<double> x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = -2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(n);
      x += log.records[i].truth.a_f * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    power += std::norm(x);
  }
  return power;
}

}  // namespace

TEST(Simulator, ControllerNames)
{
  for (auto k : acclab::all_controllers()) EXPECT_EQ(acclab::parse_controller(acclab::to_string(k)), k);
  EXPECT_THROW((void)acclab::parse_controller("pid"), acclab::InvalidParameter);
}

TEST(Simulator, EquilibriumHold)
{
  const SimConfig cfg;
  const Scenario s = steady_lead(30.0);
  for (auto kind : acclab::all_controllers()) {
    const auto log = acclab::run(s, kind, cfg);
    ASSERT_EQ(log.size(), 601u);
    for (const auto& r : log.records) {
      ASSERT_LE(std::abs(r.truth.d_error), 1e-6) << acclab::to_string(kind) << " t=" << r.t;
      ASSERT_LE(std::abs(r.truth.v_rel), 1e-6) << acclab::to_string(kind) << " t=" << r.t;
    }
  }
}

TEST(Simulator, DeadZoneLimitCycleBelowCoastSpeed)
{
  // a_des = 0 sits inside the coast band at these speeds, so the gap settles
  // into a small throttle/coast cycle instead of an exact hold
  const SimConfig cfg;
  for (double v : {10.0, 15.0}) {
    for (auto kind : acclab::all_controllers()) {
      const auto m = acclab::compute_metrics(acclab::run(steady_lead(60.0, v), kind, cfg));
      EXPECT_LT(m.max_abs_d_error, 0.5) << acclab::to_string(kind) << " v=" << v;
      EXPECT_LT(m.max_abs_a_f_g, 0.05) << acclab::to_string(kind) << " v=" << v;
      EXPECT_GT(m.actuator_switches, 0);
    }
  }
}

TEST(Simulator, DeterministicPerSeed)
{
  const SimConfig cfg;
  for (auto kind : {ControllerKind::LQG, ControllerKind::ALQG, ControllerKind::MPC}) {
    const auto a = csv_of(acclab::run(noisy_sinusoid(5), kind, cfg));
    const auto b = csv_of(acclab::run(noisy_sinusoid(5), kind, cfg));
    const auto c = csv_of(acclab::run(noisy_sinusoid(6), kind, cfg));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
  }
}

TEST(Simulator, SubstreamsIndependent)
{
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (std::uint64_t stream = 0; stream < 4; ++stream) seen.insert(acclab::substream_seed(seed, stream));
  }
  EXPECT_EQ(seen.size(), 400u);

  // enabling process noise leaves the measurement draws untouched
  const SimConfig cfg;
  Scenario a = noisy_sinusoid(9);
  Scenario b = a;
  b.noise.process_std = 0.3;
  const auto la = acclab::run(a, ControllerKind::LQR, cfg);
  const auto lb = acclab::run(b, ControllerKind::LQR, cfg);
  for (std::size_t k = 0; k < la.size(); ++k) {
    const acclab::Vec3 ea = la.records[k].meas.vector() - la.records[k].truth.vector();
    const acclab::Vec3 eb = lb.records[k].meas.vector() - lb.records[k].truth.vector();
    ASSERT_LT((ea - eb).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Simulator, FilterReducesHighFrequencyAcceleration)
{
  const SimConfig cfg;
  const auto lqr = acclab::run(noisy_sinusoid(3), ControllerKind::LQR, cfg);
  const auto lqg = acclab::run(noisy_sinusoid(3), ControllerKind::LQG, cfg);
  EXPECT_LT(high_band_power(lqg, 2.0), high_band_power(lqr, 2.0));
}

TEST(Simulator, MeasurementNoiseStatistics)
{
  const SimConfig cfg;
  Scenario s = noisy_sinusoid(17);
  s.duration = 1e5 * 0.05;
  const auto log = acclab::run(s, ControllerKind::LQR, cfg);
  ASSERT_GE(log.size(), 100000u);
  for (int i = 0; i < 3; ++i) {
    double sum = 0.0;
    double sum2 = 0.0;
    for (const auto& r : log.records) {
      const double e = r.meas.vector()(i) - r.truth.vector()(i);
      sum += e;
      sum2 += e * e;
    }
    const double n = static_cast<double>(log.size());
    const double sd = std::sqrt(sum2 / n - (sum / n) * (sum / n));
    const double sigma = s.noise.meas_std[static_cast<std::size_t>(i)];
    EXPECT_NEAR(sd / sigma, 1.0, 0.02) << "channel " << i;
  }
}

TEST(Simulator, CruiseSettles)
{
  const SimConfig cfg;
  Scenario s = acclab::find_scenario("cruise_50");
  s.v_f0 = 40.0 * acclab::kKph;
  s.duration = 30.0;
  const auto log = acclab::run(s, ControllerKind::LQR, cfg);
  double settled = -1.0;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const bool inside = std::abs(log.v_f[k] - s.v_set) <= 0.02 * s.v_set;
    if (inside && settled < 0.0) settled = log.records[k].t;
    if (!inside) settled = -1.0;
  }
  ASSERT_GE(settled, 0.0);
  EXPECT_LE(settled, 15.0);
  for (const auto& r : log.records) EXPECT_EQ(r.ctl_mode, acclab::ControlMode::CCS);
}

TEST(Simulator, EnvelopeAndExclusiveActuators)
{
  const SimConfig cfg;
  for (const auto& base : acclab::scenario_catalog()) {
    Scenario s = base;
    s.noise.enabled = true;
    acclab::RunDiagnostics diag;
    const auto log = acclab::run(s, ControllerKind::LQG, cfg, &diag);
    EXPECT_FALSE(diag.collision) << s.name;
    for (const auto& r : log.records) {
      ASSERT_LE(std::abs(r.u_des), cfg.u_limit) << s.name;
      ASSERT_FALSE(r.throttle_pct > 0.0 && r.brake_effort > 0.0) << s.name << " t=" << r.t;
      ASSERT_GE(r.throttle_pct, 0.0);
      ASSERT_LE(r.throttle_pct, 100.0);
    }
  }
}

TEST(Simulator, CutInStartsInsideDesiredGap)
{
  const SimConfig cfg;
  const Scenario s = acclab::find_scenario("cut_in_50_40");
  const auto log = acclab::run(s, ControllerKind::LQR, cfg);
  const std::size_t k_in = static_cast<std::size_t>(std::llround(s.profile.t_event / log.sample_time));
  EXPECT_TRUE(std::isnan(log.gap[k_in - 1]));
  EXPECT_FALSE(std::isnan(log.gap[k_in]));
  EXPECT_GT(log.records[k_in].truth.d_error, 0.0);
  EXPECT_EQ(log.records[k_in - 1].ctl_mode, acclab::ControlMode::CCS);
  EXPECT_EQ(log.records[k_in].ctl_mode, acclab::ControlMode::ACC);
}

TEST(Simulator, InvalidInputsRejected)
{
  SimConfig cfg;
  Scenario s = steady_lead(1.0);
  s.duration = -1.0;
  EXPECT_THROW((void)acclab::run(s, ControllerKind::LQR, cfg), acclab::InvalidParameter);
  cfg.u_limit = 0.0;
  EXPECT_THROW((void)acclab::run(steady_lead(1.0), ControllerKind::LQR, cfg), acclab::InvalidParameter);
}

TEST(Simulator, BlowUpGuard)
{
  SimConfig cfg;
  cfg.blowup = 10.0;
  Scenario s = acclab::find_scenario("cruise_60");
  EXPECT_THROW((void)acclab::run(s, ControllerKind::LQR, cfg), acclab::NumericError);
}

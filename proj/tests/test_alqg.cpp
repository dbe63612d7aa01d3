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

#include "acclab/alqg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "acclab/errors.hpp"

using acclab::AccState;
using acclab::PhaseConfig;
using acclab::PhaseRegion;
using acclab::RegionBounds;
using acclab::WeightSet;

namespace {

// Independent band lookup: row by distance, column by relative speed.
int expected_region(double d, double v, const PhaseConfig& c)
{
  const char* far[] = {"1", "2", "3"};
  const char* near[] = {"9", "8", "7"};
  const char* close[] = {"6", "5", "4"};
  const int col = v < -c.delta_v ? 0 : (v <= c.delta_v ? 1 : 2);
  const char** row = d > c.delta_d ? far : (d >= -c.delta_d ? near : close);
  return std::atoi(row[col]);
}

RegionBounds box_bounds()
{
  return {{0.5, 3.0}, {0.5, 3.0}, {0.5, 3.0}, {0.5, 3.0}, 4.0};
}

}  // namespace

TEST(Classify, NamedRegions)
{
  const PhaseConfig c;
  EXPECT_EQ(acclab::classify(0.0, 0.0, c).id, 8);
  EXPECT_EQ(acclab::classify(-2.0, -1.0, c).id, 6);
  EXPECT_EQ(acclab::classify(0.0, 1.0, c).id, 7);
  EXPECT_EQ(acclab::classify(0.0, -1.0, c).id, 9);
  EXPECT_EQ(acclab::classify(5.0, -1.0, c).id, 1);
  EXPECT_EQ(acclab::classify(5.0, 0.0, c).id, 2);
  EXPECT_EQ(acclab::classify(5.0, 1.0, c).id, 3);
  EXPECT_EQ(acclab::classify(-5.0, 1.0, c).id, 4);
  EXPECT_EQ(acclab::classify(-5.0, 0.0, c).id, 5);
}

TEST(Classify, TotalWithBoundaryFuzz)
{
  const PhaseConfig c;
  std::vector<double> ds;
  std::vector<double> vs;
  for (double b : {-c.delta_d, c.delta_d}) {
    for (double e : {-1e-12, 0.0, 1e-12}) ds.push_back(b + e);
  }
  for (double b : {-c.delta_v, c.delta_v}) {
    for (double e : {-1e-12, 0.0, 1e-12}) vs.push_back(b + e);
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    ds.push_back(u(rng));
    vs.push_back(u(rng));
  }
  for (double d : ds) {
    for (double v : vs) {
      const int id = acclab::classify(d, v, c).id;
      ASSERT_GE(id, 1);
      ASSERT_LE(id, 9);
      ASSERT_EQ(id, expected_region(d, v, c)) << d << ", " << v;
    }
  }
}

TEST(Classify, PlaneAxisConvention)
{
  PhaseConfig c;
  const AccState close{3.0, 0.0, 0.0};  // d_desire - d = 3: too close
  EXPECT_DOUBLE_EQ(acclab::plane_distance(close, c), -3.0);
  c.gap_surplus_axis = false;
  EXPECT_DOUBLE_EQ(acclab::plane_distance(close, c), 3.0);
}

TEST(RegionBoundsTest, DefaultTableOrderings)
{
  const auto& t = acclab::default_bounds_table();
  auto b = [&](int id) { return acclab::region_bounds(PhaseRegion{id}, t); };
  for (int id = 1; id <= 9; ++id) EXPECT_NO_THROW(b(id).validate());
  EXPECT_GE(b(8).rho3.lo, 5.0 * b(6).rho3.lo);
  EXPECT_LE(b(1).rho1.hi, b(6).rho1.hi);
  // steady and near-opening keep a high rho3 floor, near-closing a low cap
  EXPECT_GT(b(7).rho3.lo, b(9).rho3.hi);
  EXPECT_GT(b(8).rho3.lo, b(9).rho3.hi);
  // region 6 has the lowest rho3 cap
  for (int id = 1; id <= 9; ++id) {
    if (id != 6) {
      EXPECT_LT(b(6).rho3.hi, b(id).rho3.hi);
    }
  }
  // far rows and close-opening/matched cap rho1 and rho2 below the dangerous region
  for (int id : {1, 2, 3, 4, 5}) {
    EXPECT_LT(b(id).rho1.hi, b(6).rho1.hi);
    EXPECT_LT(b(id).rho2.hi, b(6).rho2.hi);
  }
  EXPECT_THROW((void)acclab::region_bounds(PhaseRegion{0}, t), acclab::InvalidParameter);
  EXPECT_THROW((void)acclab::region_bounds(PhaseRegion{10}, t), acclab::InvalidParameter);
}

TEST(RegionBoundsTest, InvariantsEnforced)
{
  RegionBounds bad = box_bounds();
  bad.floor = 1.0;  // below the lower sum
  EXPECT_THROW(bad.validate(), acclab::InvalidParameter);
  bad = box_bounds();
  bad.floor = 13.0;  // above the upper sum
  EXPECT_THROW(bad.validate(), acclab::InvalidParameter);
  bad = box_bounds();
  bad.r = {0.0, 1.0};
  EXPECT_THROW(bad.validate(), acclab::InvalidParameter);
  bad = box_bounds();
  bad.rho2 = {2.0, 1.0};
  EXPECT_THROW(bad.validate(), acclab::InvalidParameter);
}

TEST(CoordinateDescent, SeparableQuadraticOneSweep)
{
  const std::array<double, 4> c{1.2, 2.1, 0.9, 1.7};
  auto f = [&](const WeightSet& w) {
    const auto a = w.as_array();
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (a[i] - c[i]) * (a[i] - c[i]);
    return s;
  };
  const auto res = acclab::coordinate_descent(f, box_bounds(), {2.5, 2.5, 2.5, 2.5});
  ASSERT_GE(res.history.size(), 2u);
  EXPECT_LT(res.history[1], 1e-5);
  const auto w = res.weights.as_array();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(w[i], c[i], 2.5e-3);
}

TEST(CoordinateDescent, FlatObjectiveReturnsInit)
{
  const WeightSet init{1.0, 1.5, 1.0, 2.0};
  const auto res = acclab::coordinate_descent([](const WeightSet&) { return 3.0; }, box_bounds(), init);
  EXPECT_EQ(res.weights, init);
  EXPECT_DOUBLE_EQ(res.J, 3.0);
}

TEST(CoordinateDescent, MatchesGridSearchWithFloor)
{
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 3.5);
  const RegionBounds b = box_bounds();
  constexpr int kGrid = 41;
  auto axis = [&](int i, int k) {
    const auto lo = b.lower()[static_cast<std::size_t>(i)];
    const auto hi = b.upper()[static_cast<std::size_t>(i)];
    return lo + (hi - lo) * k / (kGrid - 1);
  };
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::Matrix4d F;
    for (int i = 0; i < 16; ++i) F(i) = n(rng);
    const Eigen::Matrix4d Q = F * F.transpose() + 0.2 * Eigen::Matrix4d::Identity();
    // centre often outside the floor so the constraint is active
    const Eigen::Vector4d c(u(rng) * 0.4, u(rng) * 0.4, u(rng), u(rng));
    auto f = [&](const WeightSet& w) {
      const auto a = w.as_array();
      const Eigen::Vector4d d = Eigen::Vector4d(a[0], a[1], a[2], a[3]) - c;
      return d.dot(Q * d);
    };

    double best = std::numeric_limits<double>::infinity();
    std::array<int, 4> arg{};
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        for (int k = 0; k < kGrid; ++k) {
          for (int l = 0; l < kGrid; ++l) {
            const WeightSet w{axis(0, i), axis(1, j), axis(2, k), axis(3, l)};
            if (w.sum() < b.floor) continue;
            const double v = f(w);
            if (v < best) {
              best = v;
              arg = {i, j, k, l};
            }
          }
        }
      }
    }
    // objective spread over the neighbouring grid cells
    double cell = 0.0;
    for (int dim = 0; dim < 4; ++dim) {
      for (int step : {-1, 1}) {
        auto idx = arg;
        idx[static_cast<std::size_t>(dim)] = std::clamp(idx[static_cast<std::size_t>(dim)] + step, 0, kGrid - 1);
        cell = std::max(cell, std::abs(f({axis(0, idx[0]), axis(1, idx[1]), axis(2, idx[2]), axis(3, idx[3])}) - best));
      }
    }

    acclab::DescentOptions opts;
    opts.max_sweeps = 50;
    opts.tolerance = 1e-10;
    const auto res = acclab::coordinate_descent(f, b, {3.0, 3.0, 3.0, 3.0}, opts);
    EXPECT_TRUE(b.contains(res.weights, 1e-9));
    EXPECT_LE(res.J, best + cell) << "trial " << trial;
    for (std::size_t s = 1; s < res.history.size(); ++s) EXPECT_LE(res.history[s], res.history[s - 1]);
  }
}

TEST(CoordinateDescent, Errors)
{
  auto f = [](const WeightSet& w) { return w.sum(); };
  EXPECT_THROW((void)acclab::coordinate_descent(f, box_bounds(), {0.5, 0.5, 0.5, 0.5}), acclab::InvalidParameter);
  EXPECT_THROW((void)acclab::coordinate_descent(f, box_bounds(), {5, 1, 1, 1}), acclab::InvalidParameter);
  auto nan = [](const WeightSet& w) { return w.rho1 > 2.0 ? std::nan("") : 1.0; };
  EXPECT_THROW((void)acclab::coordinate_descent(nan, box_bounds(), {1, 1, 1, 1}), acclab::NumericError);
}

TEST(ProjectFeasible, LandsInsideBounds)
{
  const RegionBounds b = box_bounds();
  for (const WeightSet w : {WeightSet{0, 0, 0, 0}, WeightSet{9, 9, 9, 9}, WeightSet{0.5, 0.6, 3.0, 0.1}}) {
    EXPECT_TRUE(b.contains(acclab::project_feasible(w, b), 1e-12));
  }
}

TEST(AlqgStep, EquilibriumGivesZero)
{
  const auto dss = acclab::discretize(acclab::PlantParams{});
  const auto s = acclab::alqg_step(AccState{}, WeightSet{}, dss, acclab::AlqgConfig{}, 0.0);
  EXPECT_DOUBLE_EQ(s.u, 0.0);
  EXPECT_EQ(s.region.id, 8);
}

TEST(AlqgStep, WeightsFeasibleAndStabilizing)
{
  const auto dss = acclab::discretize(acclab::PlantParams{});
  const acclab::AlqgConfig cfg;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int i = 0; i < 30; ++i) {
    const AccState x{n(rng), n(rng), 0.3 * n(rng)};
    const auto s = acclab::alqg_step(x, WeightSet{}, dss, cfg, 0.2 * n(rng));
    const auto& b = acclab::region_bounds(s.region, cfg.table);
    EXPECT_TRUE(b.contains(s.tune.weights, 1e-9));
    EXPECT_LT(acclab::spectral_radius(dss.G - dss.H * s.tune.gain), 1.0);
    EXPECT_NEAR(s.u, acclab::lqr_control(x, s.tune.gain), 1e-15);
  }
}

TEST(AlqgStep, DangerousRegionActsHarder)
{
  const auto dss = acclab::discretize(acclab::PlantParams{});
  const acclab::AlqgConfig cfg;
  const AccState danger{3.0, -2.0, 0.0};  // close and closing
  const AccState far{-3.0, -2.0, 0.0};    // far and closing
  const auto s6 = acclab::alqg_step(danger, WeightSet{}, dss, cfg, 0.0);
  const auto s1 = acclab::alqg_step(far, WeightSet{}, dss, cfg, 0.0);
  ASSERT_EQ(s6.region.id, 6);
  ASSERT_EQ(s1.region.id, 1);
  EXPECT_GE(std::abs(s6.u), std::abs(s1.u));
}

TEST(AlqgStep, WeightsContinuousInState)
{
  const auto dss = acclab::discretize(acclab::PlantParams{});
  const acclab::AlqgConfig cfg;
  const AccState x{2.5, -1.5, 0.2};
  const AccState y{2.5 + 1e-6, -1.5 - 1e-6, 0.2};
  const auto a = acclab::alqg_step(x, WeightSet{}, dss, cfg, 0.0).tune.weights.as_array();
  const auto b = acclab::alqg_step(y, WeightSet{}, dss, cfg, 0.0).tune.weights.as_array();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], 1e-2);
}

TEST(GainCacheTest, MatchesSolverAndCounts)
{
  const auto dss = acclab::discretize(acclab::PlantParams{});
  acclab::GainCache cache;
  const WeightSet w{1.5, 0.7, 2.0, 0.9};
  const auto k = cache.gain(dss, w);
  EXPECT_EQ(k, acclab::lqr_gain(dss, w).K);
  EXPECT_EQ(cache.gain(dss, w), k);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(cache.misses(), 1u);
}

TEST(AlqgControllerTest, RetuneCadenceAndDeadZone)
{
  const auto dss = acclab::discretize(acclab::PlantParams{});
  acclab::AlqgConfig cfg;
  acclab::AlqgController ctl(dss, cfg, WeightSet{});
  const AccState x{-4.0, 0.0, 0.0};  // region 2
  for (int k = 0; k < 25; ++k) (void)ctl.step(x, 0.0);
  EXPECT_EQ(ctl.region().id, 2);
  EXPECT_EQ(ctl.retunes(), 3);

  // tiny error in the steady region: output suppressed
  const AccState tiny{0.05, 0.01, 0.0};
  EXPECT_DOUBLE_EQ(ctl.step(tiny, 0.0), 0.0);
  EXPECT_EQ(ctl.region().id, 8);
  cfg.dead_zone_u = 0.0;
  acclab::AlqgController raw(dss, cfg, WeightSet{});
  EXPECT_NE(raw.step(tiny, 0.0), 0.0);

  ctl.reset();
  EXPECT_EQ(ctl.weights(), WeightSet{});
}

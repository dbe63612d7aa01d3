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

#include "acclab/config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "acclab/errors.hpp"

namespace fs = std::filesystem;
using acclab::ConfigError;
using acclab::Json;

namespace {

const fs::path kConfigs = fs::path(ACCLAB_SOURCE_DIR) / "configs";

fs::path write_temp(const std::string& name, const std::string& text)
{
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Config, DefaultsRoundTrip)
{
  const auto cfg = acclab::config_from_json(Json::object());
  EXPECT_EQ(acclab::to_json(cfg), acclab::default_config_json());
  EXPECT_TRUE(cfg.scenarios.empty());
  EXPECT_EQ(acclab::to_json(cfg.sim), acclab::to_json(acclab::SimConfig{}));
}

TEST(Config, ShippedDefaultMatchesBuiltIn)
{
  EXPECT_EQ(acclab::read_config_file(kConfigs / "default.json"), acclab::default_config_json());
}

TEST(Config, TransferFunctionPreset)
{
  const auto cfg = acclab::load_config(kConfigs / "transfer_function.json", {});
  const auto preset = acclab::PlantParams::transfer_function_preset();
  EXPECT_NEAR(cfg.sim.plant.tau_h, preset.tau_h, 1e-9);
  EXPECT_NEAR(cfg.sim.plant.t_lag, preset.t_lag, 1e-9);
  EXPECT_NEAR(cfg.sim.plant.k_gain, preset.k_gain, 1e-9);
  const auto s = acclab::resolve_scenario(cfg, "sinusoid_noisy");
  EXPECT_TRUE(s.noise.enabled);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.profile.kind, acclab::ProfileKind::Sinusoid);
  EXPECT_EQ(s.duration, acclab::find_scenario("sinusoid").duration);
}

TEST(Config, PartialDocumentLayersOverDefaults)
{
  const auto cfg = acclab::config_from_json(Json::parse(R"({"plant": {"tau_h": 2.0}, "mpc": {"horizon": 7}})"));
  EXPECT_EQ(cfg.sim.plant.tau_h, 2.0);
  EXPECT_EQ(cfg.sim.plant.d0, acclab::PlantParams{}.d0);
  EXPECT_EQ(cfg.sim.mpc.horizon, 7);
}

TEST(Config, UnknownKeysAndBadTypesRejected)
{
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"plnt": {}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"plant": {"tau": 1}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"plant": {"tau_h": "fast"}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"plant": 3})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"estimator": {"q_k": [[1, 0], [0, 1]]}})")), ConfigError);
  try {
    (void)acclab::config_from_json(Json::parse(R"({"alqg": {"bounds": {"4": {"rho9": [1, 2]}}}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alqg.bounds.4.rho9"), std::string::npos);
  }
}

TEST(Config, InvalidValuesRejected)
{
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"plant": {"tau_h": -1}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"supervisor": {"t_safety": 0.9}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"lqr": {"r": 0}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"actuation": {"throttle": {"rule_p": ["BBBBB"]}}})")),
               ConfigError);
}

TEST(Config, Overrides)
{
  Json doc = acclab::default_config_json();
  acclab::apply_override(doc, "plant.tau_h=1.8");
  acclab::apply_override(doc, "supervisor.hold_in_dead_zone=true");
  acclab::apply_override(doc, "lqr.r=0.5");
  EXPECT_EQ(doc["plant"]["tau_h"], 1.8);
  EXPECT_EQ(doc["supervisor"]["hold_in_dead_zone"], true);
  const auto cfg = acclab::config_from_json(doc);
  EXPECT_EQ(cfg.sim.plant.tau_h, 1.8);
  EXPECT_TRUE(cfg.sim.switching.hold_in_dead_zone);
  EXPECT_EQ(cfg.sim.lqr.r, 0.5);

  EXPECT_THROW(acclab::apply_override(doc, "plant.nope=1"), ConfigError);
  EXPECT_THROW(acclab::apply_override(doc, "plant..tau_h=1"), ConfigError);
  EXPECT_THROW(acclab::apply_override(doc, "plant.tau_h"), ConfigError);
  EXPECT_THROW(acclab::apply_override(doc, "=1"), ConfigError);
  EXPECT_THROW(acclab::apply_override(doc, "plant.tau_h.x=1"), ConfigError);

  acclab::apply_override(doc, "plant.tau_h=quick");
  EXPECT_EQ(doc["plant"]["tau_h"], "quick");
  EXPECT_THROW((void)acclab::config_from_json(doc), ConfigError);
}

TEST(Config, ScenarioOverridesAreFreeForm)
{
  Json doc = acclab::default_config_json();
  acclab::apply_override(doc, R"(scenarios.slow.base="cruise_30")");
  acclab::apply_override(doc, "scenarios.slow.duration=12");
  const auto cfg = acclab::config_from_json(doc);
  const auto s = acclab::resolve_scenario(cfg, "slow");
  EXPECT_EQ(s.name, "slow");
  EXPECT_EQ(s.duration, 12.0);
  EXPECT_EQ(s.profile.kind, acclab::ProfileKind::None);
  EXPECT_EQ(acclab::resolve_scenario(cfg, "cut_in_30_40").name, "cut_in_30_40");
  EXPECT_THROW((void)acclab::resolve_scenario(cfg, "missing"), ConfigError);
}

TEST(Config, ScenarioErrors)
{
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"scenarios": {"x": {"base": "nope"}}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"scenarios": {"x": {"speed": 3}}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"scenarios": {"x": {"profile": {"kind": "zigzag"}}}})")),
               ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"scenarios": {"x": {"duration": -2}}})")), ConfigError);
  EXPECT_THROW((void)acclab::config_from_json(Json::parse(R"({"scenarios": {"x": 5}})")), ConfigError);
}

TEST(Config, ScenarioJsonRoundTrip)
{
  for (const auto& s : acclab::scenario_catalog()) {
    acclab::Scenario base;
    base.name = s.name;
    const auto back = acclab::scenario_from_json(acclab::to_json(s), base);
    EXPECT_EQ(acclab::to_json(back), acclab::to_json(s)) << s.name;
    EXPECT_EQ(back.profile.t_lost, s.profile.t_lost);
  }
  const auto inf_json = acclab::to_json(acclab::find_scenario("sinusoid"));
  EXPECT_TRUE(inf_json["profile"]["t_lost"].is_null());
}

TEST(Config, FileErrors)
{
  EXPECT_THROW((void)acclab::read_config_file("/nonexistent/acclab.json"), ConfigError);
  const auto bad = write_temp("acclab_bad.json", "{ \"plant\": ");
  EXPECT_THROW((void)acclab::read_config_file(bad), ConfigError);
  const auto arr = write_temp("acclab_arr.json", "[1, 2]");
  EXPECT_THROW((void)acclab::load_config(arr, {}), ConfigError);
  const auto commented = write_temp("acclab_comment.json", "{\n  // slower lag\n  \"plant\": {\"t_lag\": 0.8}\n}\n");
  const auto cfg = acclab::load_config(commented, {"plant.t_lag=0.9"});
  EXPECT_EQ(cfg.sim.plant.t_lag, 0.9);
  fs::remove(bad);
  fs::remove(arr);
  fs::remove(commented);
}

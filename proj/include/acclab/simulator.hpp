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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "acclab/actuation.hpp"
#include "acclab/alqg.hpp"
#include "acclab/estimator.hpp"
#include "acclab/mpc.hpp"
#include "acclab/plant.hpp"
#include "acclab/qpolicy.hpp"
#include "acclab/riccati.hpp"
#include "acclab/scenario.hpp"
#include "acclab/simlog.hpp"
#include "acclab/supervisor.hpp"

namespace acclab {

enum class ControllerKind { LQR, LQG, ALQG, QPolicy, MPC };

[[nodiscard]] std::string_view to_string(ControllerKind k);
/// Accepts lqr, lqg, alqg, qpolicy, mpc; throws InvalidParameter naming them.
[[nodiscard]] ControllerKind parse_controller(std::string_view name);
[[nodiscard]] const std::vector<ControllerKind>& all_controllers();

/// Simulated vehicle: command = coast(v) + throttle/100 a_thr_max - brake a_brake_max.
struct ActuatorMap {
  double a_throttle_max = 3.0;  ///< [m/s^2] at 100 % throttle
  double a_brake_max = 6.0;     ///< [m/s^2] at brake effort 1

  void validate() const;
};

struct LowerConfig {
  double prefilter_wn = 10.0;
  double prefilter_xi = 1.0;
  FuzzyPidConfig throttle;
  IncPidConfig brake;
  ActuatorMap vehicle;
};

struct QPolicyStackConfig {
  PolicyIterationOptions learning;
  ExplorationConfig exploration;
  double initial_gain_scale = 0.5;  ///< K0 = scale * K_dare
};

struct SimConfig {
  PlantParams plant;
  WeightSet lqr;
  KalmanConfig kalman;
  AlqgConfig alqg;
  MpcConfig mpc;
  QPolicyStackConfig qpolicy;
  LowerConfig lower;
  SwitchConfig switching;
  double u_limit = 0.25 * kGravity;  ///< envelope on the upper-level command
  double blowup = 1e6;

  void validate() const;
};

/// Upper-level (gap) controller producing a desired acceleration.
class UpperController {
 public:
  virtual ~UpperController() = default;
  /// x: measured or filtered state; a_p: current lead acceleration estimate.
  virtual double command(const AccState& x, double a_p) = 0;
  virtual void reset() {}
  [[nodiscard]] virtual bool uses_filter() const = 0;
  [[nodiscard]] virtual WeightSet weights() const = 0;
  [[nodiscard]] virtual int region() const { return 0; }
  virtual void report(struct RunDiagnostics& /*diag*/) const {}
};

[[nodiscard]] std::unique_ptr<UpperController> make_upper(ControllerKind kind, const DiscreteSS& dss,
                                                          const SimConfig& cfg);

/// Gain learned by the Q-policy stack (u = K x).
[[nodiscard]] Row3 learn_policy_gain(const DiscreteSS& dss, const SimConfig& cfg);

struct RunDiagnostics {
  double min_gap = 0.0;  ///< smallest true gap while a target was present [m]
  bool collision = false;
  double max_abs_u = 0.0;
  int alqg_retunes = 0;
  int alqg_fallbacks = 0;
  int mpc_unconverged = 0;
};

/// Fixed-step closed loop. Identical inputs give identical logs.
/// Throws NumericError if the state leaves the blow-up bound.
[[nodiscard]] SimLog run(const Scenario& scenario, ControllerKind kind, const SimConfig& cfg,
                         RunDiagnostics* diag = nullptr);

/// Seed of an independent named substream (splitmix64 of seed and stream id).
[[nodiscard]] std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace acclab

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

#include "acclab/plant.hpp"

namespace acclab {

struct KalmanConfig {
  Mat3 Q_K = Vec3(1e-4, 1e-4, 1e-4).asDiagonal();  ///< process noise covariance
  Mat3 R_K = Vec3(0.25, 0.04, 0.01).asDiagonal();  ///< measurement noise covariance
  Mat3 H = Mat3::Identity();                       ///< measurement matrix

  void validate() const;
};

struct KalmanState {
  Vec3 x_hat = Vec3::Zero();
  Mat3 P = Mat3::Zero();
};

/// Time update. The disturbance term is dropped unless a known value of the
/// preceding-vehicle acceleration is supplied as feedforward.
[[nodiscard]] KalmanState kf_predict(const KalmanState& state, double u, const DiscreteSS& dss, const KalmanConfig& cfg,
                                     double w_known = 0.0);

/// Measurement update with y = H x + z. Uses the Joseph form so P stays
/// symmetric positive semi-definite.
[[nodiscard]] KalmanState kf_update(const KalmanState& state, const Vec3& y, const KalmanConfig& cfg);

/// Innovation y - H x_hat of a predicted state.
[[nodiscard]] inline Vec3 innovation(const KalmanState& predicted, const Vec3& y, const KalmanConfig& cfg)
{
  return y - cfg.H * predicted.x_hat;
}

/// Stateful wrapper used by the simulator: initialises on the first
/// measurement and records the last innovation.
class KalmanFilter {
 public:
  KalmanFilter(DiscreteSS dss, KalmanConfig cfg);

  /// Predicts with the previous command (if any) and fuses y.
  const Vec3& step(const Vec3& y, double w_known = 0.0);
  /// Records the command applied after the latest step.
  void set_applied_input(double u) { last_u_ = u; }
  void reset();

  [[nodiscard]] bool initialized() const { return initialized_; }
  [[nodiscard]] const KalmanState& state() const { return state_; }
  [[nodiscard]] const Vec3& last_innovation() const { return innovation_; }

 private:
  DiscreteSS dss_;
  KalmanConfig cfg_;
  KalmanState state_;
  Vec3 innovation_ = Vec3::Zero();
  double last_u_ = 0.0;
  double last_w_ = 0.0;
  bool initialized_ = false;
};

}  // namespace acclab

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

#include <Eigen/Dense>

namespace acclab {

inline constexpr double kGravity = 9.81;  // [m/s^2]

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Row3 = Eigen::RowVector3d;

/// Physical parameters of the car-following model.
///
/// The lower loop and vehicle are lumped into a first-order lag
/// a_f = K_L / (T_L s + 1) a_des, and the spacing policy is constant
/// headway d_desire = tau_h v_f + d0.
struct PlantParams {
  double tau_h = 1.5;         ///< headway time [s]
  double d0 = 5.0;            ///< standstill gap [m]
  double t_lag = 0.5;         ///< lower-loop lag time constant T_L [s]
  double k_gain = 1.0;        ///< lower-loop gain K_L [-]
  double sample_time = 0.05;  ///< controller sample time T_s [s]

  /// Throws InvalidParameter if any field is out of range.
  void validate() const;

  /// Parameters matching the transfer function (0.12 s + 0.02143) / (s^3 + 0.1429 s^2).
  static PlantParams transfer_function_preset();
};

/// Regulation state x = [d_error, v_rel, a_f] with d_error = d_desire - d
/// and v_rel = v_p - v_f.
struct AccState {
  double d_error = 0.0;  ///< [m]
  double v_rel = 0.0;    ///< [m/s]
  double a_f = 0.0;      ///< [m/s^2]

  [[nodiscard]] Vec3 vector() const { return {d_error, v_rel, a_f}; }
  [[nodiscard]] static AccState from_vector(const Vec3& v) { return {v(0), v(1), v(2)}; }
  [[nodiscard]] bool finite() const;

  friend bool operator==(const AccState&, const AccState&) = default;
};

/// x' = A x + B u + Gamma w, y = C x, with w = a_p.
struct ContinuousSS {
  Mat3 A = Mat3::Zero();
  Vec3 B = Vec3::Zero();
  Vec3 Gamma = Vec3::Zero();
  Mat3 C = Mat3::Identity();
};

/// x_{k+1} = G x_k + H u_k + L w_k.
struct DiscreteSS {
  Mat3 G = Mat3::Identity();
  Vec3 H = Vec3::Zero();
  Vec3 L = Vec3::Zero();
  double sample_time = 0.0;
};

[[nodiscard]] ContinuousSS build_continuous(const PlantParams& params);

/// d_desire = tau_h v_f + d0. Throws InvalidParameter for negative speed.
[[nodiscard]] double desired_distance(double v_f, const PlantParams& params);

/// Exact zero-order-hold discretization through the exponential of the
/// augmented matrix [[A, B, Gamma], [0, 0, 0]] * T_s.
[[nodiscard]] DiscreteSS discretize_zoh(const ContinuousSS& ss, double sample_time);

/// Convenience: build_continuous followed by discretize_zoh at params.sample_time.
[[nodiscard]] DiscreteSS discretize(const PlantParams& params);

/// Noise-free truth propagation G x + H u + L a_p.
[[nodiscard]] AccState step_truth(const AccState& x, double u, double a_p, const DiscreteSS& dss);

/// Rank of [B, AB, A^2 B].
[[nodiscard]] int controllability_rank(const ContinuousSS& ss);

/// Rank of [C; CA; CA^2].
[[nodiscard]] int observability_rank(const ContinuousSS& ss);

/// Exact integral of a_f over one sample under held command u (the follower
/// speed change across the step).
[[nodiscard]] double follower_speed_increment(double a_f, double u, const PlantParams& params);

/// One-sample response of the acceleration lag alone.
[[nodiscard]] double follower_accel_step(double a_f, double u, const PlantParams& params);

}  // namespace acclab

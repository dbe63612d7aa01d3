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

#include "acclab/plant.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "acclab/errors.hpp"

namespace acclab {

void PlantParams::validate() const
{
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidParameter(std::string("plant: ") + what);
  };
  require(std::isfinite(tau_h) && tau_h > 0.0, "tau_h must be > 0");
  require(std::isfinite(d0) && d0 >= 0.0, "d0 must be >= 0");
  require(std::isfinite(t_lag) && t_lag > 0.0, "t_lag must be > 0");
  require(std::isfinite(k_gain) && k_gain > 0.0, "k_gain must be > 0");
  require(std::isfinite(sample_time) && sample_time > 0.0, "sample_time must be > 0");
  require(sample_time < t_lag, "sample_time must be smaller than t_lag");
}

PlantParams PlantParams::transfer_function_preset()
{
  PlantParams p;
  p.tau_h = 5.6;
  p.t_lag = 7.0;
  p.k_gain = 0.15;
  return p;
}

bool AccState::finite() const
{
  return std::isfinite(d_error) && std::isfinite(v_rel) && std::isfinite(a_f);
}

ContinuousSS build_continuous(const PlantParams& params)
{
  params.validate();
  ContinuousSS ss;
  ss.A << 0.0, -1.0, params.tau_h, 0.0, 0.0, -1.0, 0.0, 0.0, -1.0 / params.t_lag;
  ss.B << 0.0, 0.0, params.k_gain / params.t_lag;
  ss.Gamma << 0.0, 1.0, 0.0;
  ss.C.setIdentity();
  return ss;
}

double desired_distance(double v_f, const PlantParams& params)
{
  if (!(v_f >= 0.0)) throw InvalidParameter("desired_distance: negative speed");
  return params.tau_h * v_f + params.d0;
}

DiscreteSS discretize_zoh(const ContinuousSS& ss, double sample_time)
{
  if (!(sample_time > 0.0) || !std::isfinite(sample_time)) {
    throw InvalidParameter("discretize_zoh: sample_time must be > 0");
  }
  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
  aug.topLeftCorner<3, 3>() = ss.A;
  aug.block<3, 1>(0, 3) = ss.B;
  aug.block<3, 1>(0, 4) = ss.Gamma;
  const Eigen::Matrix<double, 5, 5> e = (aug * sample_time).exp();

  DiscreteSS d;
  d.G = e.topLeftCorner<3, 3>();
  d.H = e.block<3, 1>(0, 3);
  d.L = e.block<3, 1>(0, 4);
  d.sample_time = sample_time;
  return d;
}

DiscreteSS discretize(const PlantParams& params)
{
  return discretize_zoh(build_continuous(params), params.sample_time);
}

AccState step_truth(const AccState& x, double u, double a_p, const DiscreteSS& dss)
{
  return AccState::from_vector(dss.G * x.vector() + dss.H * u + dss.L * a_p);
}

int controllability_rank(const ContinuousSS& ss)
{
  Mat3 ctrb;
  ctrb << ss.B, ss.A * ss.B, ss.A * ss.A * ss.B;
  return static_cast<int>(Eigen::FullPivLU<Mat3>(ctrb).rank());
}

int observability_rank(const ContinuousSS& ss)
{
  Eigen::Matrix<double, 9, 3> obsv;
  obsv << ss.C, ss.C * ss.A, ss.C * ss.A * ss.A;
  return static_cast<int>(Eigen::FullPivLU<Eigen::Matrix<double, 9, 3>>(obsv).rank());
}

double follower_speed_increment(double a_f, double u, const PlantParams& params)
{
  const double a_inf = params.k_gain * u;
  const double T = params.sample_time;
  return a_inf * T + (a_f - a_inf) * params.t_lag * -std::expm1(-T / params.t_lag);
}

double follower_accel_step(double a_f, double u, const PlantParams& params)
{
  const double decay = std::exp(-params.sample_time / params.t_lag);
  return decay * a_f + (1.0 - decay) * params.k_gain * u;
}

}  // namespace acclab

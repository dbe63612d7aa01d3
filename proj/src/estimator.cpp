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

#include "acclab/estimator.hpp"

#include <Eigen/Eigenvalues>

#include "acclab/errors.hpp"

namespace acclab {

namespace {

Mat3 symmetrize(const Mat3& m)
{
  return 0.5 * (m + m.transpose());
}

}  // namespace

void KalmanConfig::validate() const
{
  if (!Q_K.allFinite() || !R_K.allFinite() || !H.allFinite()) {
    throw InvalidParameter("kalman: covariances must be finite");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> q(symmetrize(Q_K), Eigen::EigenvaluesOnly);
  if (q.eigenvalues().minCoeff() < -1e-12) throw InvalidParameter("kalman: Q_K must be PSD");
  Eigen::SelfAdjointEigenSolver<Mat3> r(symmetrize(R_K), Eigen::EigenvaluesOnly);
  if (r.eigenvalues().minCoeff() <= 0.0) throw InvalidParameter("kalman: R_K must be positive definite");
}

KalmanState kf_predict(const KalmanState& state, double u, const DiscreteSS& dss, const KalmanConfig& cfg,
                       double w_known)
{
  KalmanState out;
  out.x_hat = dss.G * state.x_hat + dss.H * u + dss.L * w_known;
  out.P = symmetrize(dss.G * state.P * dss.G.transpose() + cfg.Q_K);
  return out;
}

KalmanState kf_update(const KalmanState& state, const Vec3& y, const KalmanConfig& cfg)
{
  const Mat3& H = cfg.H;
  const Mat3 S = H * state.P * H.transpose() + cfg.R_K;
  // K = P H' S^{-1}, computed as (S^{-1} H P)' since S and P are symmetric.
  const Mat3 K = S.ldlt().solve(H * state.P).transpose();
  const Mat3 IKH = Mat3::Identity() - K * H;

  KalmanState out;
  out.x_hat = state.x_hat + K * (y - H * state.x_hat);
  out.P = symmetrize(IKH * state.P * IKH.transpose() + K * cfg.R_K * K.transpose());
  return out;
}

KalmanFilter::KalmanFilter(DiscreteSS dss, KalmanConfig cfg) : dss_(std::move(dss)), cfg_(std::move(cfg))
{
  cfg_.validate();
}

const Vec3& KalmanFilter::step(const Vec3& y, double w_known)
{
  if (!initialized_) {
    // First fix: trust the sensor, with its own covariance.
    state_.x_hat = cfg_.H.colPivHouseholderQr().solve(y);
    state_.P = cfg_.R_K;
    innovation_.setZero();
    initialized_ = true;
  } else {
    const KalmanState predicted = kf_predict(state_, last_u_, dss_, cfg_, last_w_);
    innovation_ = innovation(predicted, y, cfg_);
    state_ = kf_update(predicted, y, cfg_);
  }
  last_w_ = w_known;
  return state_.x_hat;
}

void KalmanFilter::reset()
{
  state_ = KalmanState{};
  innovation_.setZero();
  last_u_ = 0.0;
  last_w_ = 0.0;
  initialized_ = false;
}

}  // namespace acclab

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

#include "acclab/mpc.hpp"

#include <algorithm>
#include <cmath>

#include "acclab/errors.hpp"

namespace acclab {

void MpcConfig::validate() const
{
  if (horizon < 1) throw InvalidParameter("MPC horizon must be at least 1");
  weights.validate();
  if (!(u_bound > 0.0)) throw InvalidParameter("MPC input bound must be positive");
  if (max_iters < 1) throw InvalidParameter("MPC needs at least one iteration");
  if (!(step_size >= 0.0)) throw InvalidParameter("MPC step size must be non-negative");
  if (!(kkt_tol > 0.0)) throw InvalidParameter("MPC KKT tolerance must be positive");
}

MpcController::MpcController(const DiscreteSS& dss, MpcConfig cfg) : cfg_(std::move(cfg))
{
  cfg_.validate();
  const int n = cfg_.horizon;
  const Dare3 dare = lqr_gain(dss, cfg_.weights);
  const Mat3 Q = cfg_.weights.Q();

  // x_k = phi_k x0 + sum_j gam_{k,j} u_j
  std::vector<Mat3> phi(n + 1);
  phi[0] = Mat3::Identity();
  for (int k = 1; k <= n; ++k) phi[k] = dss.G * phi[k - 1];
  Eigen::MatrixXd gam = Eigen::MatrixXd::Zero(3 * (n + 1), n);
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j < k; ++j) gam.block<3, 1>(3 * k, j) = phi[k - 1 - j] * dss.H;
  }
  Eigen::MatrixXd qbar = Eigen::MatrixXd::Zero(3 * (n + 1), 3 * (n + 1));
  Eigen::MatrixXd phibar(3 * (n + 1), 3);
  for (int k = 0; k <= n; ++k) {
    qbar.block<3, 3>(3 * k, 3 * k) = k == n ? dare.P : Q;
    phibar.block<3, 3>(3 * k, 0) = phi[k];
  }

  hess_ = 2.0 * (gam.transpose() * qbar * gam);
  hess_.diagonal().array() += 2.0 * cfg_.weights.r;
  hess_ = 0.5 * (hess_ + hess_.transpose());
  lin_ = 2.0 * gam.transpose() * qbar * phibar;
  const_ = phibar.transpose() * qbar * phibar;

  if (cfg_.step_size > 0.0) {
    step_ = cfg_.step_size;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess_, Eigen::EigenvaluesOnly);
    step_ = 1.0 / es.eigenvalues().maxCoeff();
  }
  u_ = Eigen::VectorXd::Zero(n);
}

void MpcController::reset()
{
  u_.setZero();
  warm_ = false;
}

double MpcController::objective(const Eigen::VectorXd& u, const Vec3& x) const
{
  return 0.5 * u.dot(hess_ * u) + u.dot(lin_ * x) + x.dot(const_ * x);
}

MpcResult MpcController::step(const Vec3& x)
{
  if (!x.allFinite()) throw InvalidParameter("MPC state must be finite");
  const int n = cfg_.horizon;
  const double b = cfg_.u_bound;
  const Eigen::VectorXd f = lin_ * x;
  auto project = [b](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.cwiseMax(-b).cwiseMin(b); };
  auto kkt = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd g = hess_ * u + f;
    return (u - project(u - g)).lpNorm<Eigen::Infinity>();
  };

  MpcResult res;
  trace_.clear();

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (warm_) {
    // shift the previous plan by one move, repeating the last one
    u.head(n - 1) = u_.tail(n - 1);
    u(n - 1) = u_(n - 1);
  }
  double obj = objective(u, x);
  trace_.push_back(obj);
  for (int it = 0; it < cfg_.max_iters; ++it) {
    if (kkt(u) <= cfg_.kkt_tol) break;
    const Eigen::VectorXd next = project(u - step_ * (hess_ * u + f));
    const double next_obj = objective(next, x);
    if (next_obj > obj + 1e-9 * (1.0 + std::abs(obj))) {
      throw NumericError("projected gradient objective increased");
    }
    u = next;
    obj = next_obj;
    trace_.push_back(obj);
    ++res.iterations;
  }
  u_ = u;
  warm_ = true;
  res.u = std::clamp(u(0), -b, b);
  res.kkt_residual = kkt(u);
  res.converged = res.kkt_residual <= cfg_.kkt_tol;
  res.objective = objective(u, x);
  return res;
}

MpcResult mpc_step(const AccState& x, const DiscreteSS& dss, const MpcConfig& cfg)
{
  MpcController c(dss, cfg);
  return c.step(x.vector());
}

}  // namespace acclab

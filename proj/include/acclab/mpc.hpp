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

#include <vector>

#include <Eigen/Dense>

#include "acclab/plant.hpp"
#include "acclab/riccati.hpp"

namespace acclab {

struct MpcConfig {
  int horizon = 20;
  WeightSet weights;
  double u_bound = 0.1 * kGravity;  ///< |u_k| <= u_bound [m/s^2]
  int max_iters = 200;
  double step_size = 0.0;  ///< 0 picks 1 / lambda_max of the Hessian
  double kkt_tol = 1e-6;

  void validate() const;
};

struct MpcResult {
  double u = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

/// Box-constrained LQ over the horizon with terminal cost x_N' P_dare x_N,
/// condensed to a QP in the move sequence and solved by projected gradient.
class MpcController {
 public:
  MpcController(const DiscreteSS& dss, MpcConfig cfg);

  MpcResult step(const Vec3& x);
  void reset();

  /// Move sequence of the last solve.
  [[nodiscard]] const Eigen::VectorXd& sequence() const { return u_; }
  [[nodiscard]] const Eigen::MatrixXd& hessian() const { return hess_; }
  [[nodiscard]] const MpcConfig& config() const { return cfg_; }
  [[nodiscard]] double objective(const Eigen::VectorXd& u, const Vec3& x) const;
  /// Per-iteration objective values of the last solve.
  [[nodiscard]] const std::vector<double>& trace() const { return trace_; }

 private:
  MpcConfig cfg_;
  Eigen::MatrixXd hess_;   // N x N, objective 0.5 u'Hu + f'u + c
  Eigen::MatrixXd lin_;    // N x 3, f = lin_ x
  Eigen::Matrix3d const_;  // c = x' const_ x
  double step_ = 0.0;
  Eigen::VectorXd u_;
  bool warm_ = false;
  std::vector<double> trace_;
};

/// Stateless single solve.
[[nodiscard]] MpcResult mpc_step(const AccState& x, const DiscreteSS& dss, const MpcConfig& cfg);

}  // namespace acclab

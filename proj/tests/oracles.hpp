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
#include <unsupported/Eigen/KroneckerProduct>

#include <functional>

// Independent reference implementations used as test oracles.
namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Classical RK4 on xdot = A x + B u + Gam w with u, w held over [0, T].
inline Vec rk4_step(const Mat& A, const Vec& B, const Vec& Gam, const Vec& x0, double u, double w, double T,
                    int substeps = 1000)
{
  const double h = T / substeps;
  auto f = [&](const Vec& x) -> Vec { return A * x + B * u + Gam * w; };
  Vec x = x0;
  for (int i = 0; i < substeps; ++i) {
    const Vec k1 = f(x);
    const Vec k2 = f(x + 0.5 * h * k1);
    const Vec k3 = f(x + 0.5 * h * k2);
    const Vec k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

// Riccati value iteration P <- Q + G'PG - G'PH (R + H'PH)^-1 H'PG from P = 0,
// carried out in extended precision.
inline Mat dare_value_iteration(const Mat& G, const Mat& H, const Mat& Q, const Mat& R, int max_sweeps = 200000,
                                long double tol = 1e-15L)
{
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatL g = G.cast<long double>();
  const MatL h = H.cast<long double>();
  const MatL q = Q.cast<long double>();
  const MatL r = R.cast<long double>();
  MatL P = MatL::Zero(G.rows(), G.cols());
  for (int i = 0; i < max_sweeps; ++i) {
    const MatL S = r + h.transpose() * P * h;
    const MatL next = q + g.transpose() * P * g - g.transpose() * P * h * S.inverse() * h.transpose() * P * g;
    const long double change = (next - P).cwiseAbs().maxCoeff();
    P = 0.5L * (next + next.transpose());
    if (change <= tol * std::max(1.0L, P.cwiseAbs().maxCoeff())) break;
  }
  return P.cast<double>();
}

// Solves A'X + XA + C = 0 through the Kronecker form.
inline Mat lyapunov(const Mat& A, const Mat& C)
{
  const auto n = A.rows();
  const Mat I = Mat::Identity(n, n);
  Mat M = Eigen::kroneckerProduct(I, A.transpose()) + Eigen::kroneckerProduct(A.transpose(), I);
  Vec c = Eigen::Map<const Vec>(C.data(), n * n);
  Vec x = M.fullPivLu().solve(-c);
  Mat X = Eigen::Map<Mat>(x.data(), n, n);
  return 0.5 * (X + X.transpose());
}

// Newton-Kleinman for the CARE from a stabilizing K0.
inline Mat care_newton_kleinman(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, Mat K, int iters = 100)
{
  Mat P;
  for (int i = 0; i < iters; ++i) {
    const Mat Ak = A - B * K;
    P = lyapunov(Ak, Q + K.transpose() * R * K);
    const Mat next = R.inverse() * B.transpose() * P;
    if ((next - K).cwiseAbs().maxCoeff() < 1e-15) break;
    K = next;
  }
  return P;
}

// First move of the N-step finite horizon LQ problem solved backwards.
inline double dp_first_move(const Mat& G, const Mat& H, const Mat& Q, const Mat& R, const Vec& x0, int N)
{
  Mat P = Q;
  Mat K;
  for (int k = 0; k < N; ++k) {
    const Mat S = R + H.transpose() * P * H;
    K = S.inverse() * H.transpose() * P * G;
    P = Q + G.transpose() * P * (G - H * K);
  }
  return -(K * x0)(0);
}

}  // namespace oracle

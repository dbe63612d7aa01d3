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

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "acclab/errors.hpp"
#include "acclab/plant.hpp"

namespace acclab {

/// LQ weights Q = diag(rho1, rho2, rho3), R = [r].
struct WeightSet {
  double rho1 = 1.0;
  double rho2 = 1.0;
  double rho3 = 1.0;
  double r = 1.0;

  [[nodiscard]] Mat3 Q() const { return Vec3(rho1, rho2, rho3).asDiagonal(); }
  [[nodiscard]] std::array<double, 4> as_array() const { return {rho1, rho2, rho3, r}; }
  [[nodiscard]] static WeightSet from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
  [[nodiscard]] double sum() const { return rho1 + rho2 + rho3 + r; }
  /// Q must be PSD (rho_i >= 0) and R positive definite (r > 0).
  void validate() const;

  friend bool operator==(const WeightSet&, const WeightSet&) = default;
};

template <int N, int M>
struct RiccatiSolution {
  Eigen::Matrix<double, N, N> P;
  Eigen::Matrix<double, M, N> K;
  double residual = 0.0;
  int iterations = 0;
};

using Dare3 = RiccatiSolution<3, 1>;

struct RiccatiOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

namespace detail {

template <typename Derived>
double spectral_radius_of(const Eigen::MatrixBase<Derived>& m)
{
  using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>;
  Eigen::EigenSolver<Mat> es(Mat(m), /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Derived>
double max_real_eigenvalue(const Eigen::MatrixBase<Derived>& m)
{
  using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>;
  Eigen::EigenSolver<Mat> es(Mat(m), /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace detail

/// Largest eigenvalue modulus.
inline double spectral_radius(const Eigen::MatrixXd& m)
{
  return detail::spectral_radius_of(m);
}

/// Schur stability of a 3x3 matrix via the Jury test on its characteristic
/// polynomial. Cheaper than an eigen-decomposition in the tuning inner loop.
[[nodiscard]] bool is_schur_stable(const Mat3& m);

/// Stabilizing solution of the discrete algebraic Riccati equation
///   P = Q + G'PG - G'PH (R + H'PH)^{-1} H'PG
/// by the structured doubling algorithm. K = (R + H'PH)^{-1} H'PG so that
/// u = -K x. Throws NumericError if the iteration diverges or the closed loop
/// G - HK is not Schur stable (e.g. the pair is not stabilizable).
template <int N, int M>
RiccatiSolution<N, M> solve_dare(const Eigen::Matrix<double, N, N>& G, const Eigen::Matrix<double, N, M>& H,
                                 const Eigen::Matrix<double, N, N>& Q, const Eigen::Matrix<double, M, M>& R,
                                 const RiccatiOptions& opts = {})
{
  using MatN = Eigen::Matrix<double, N, N>;
  const Eigen::Index n = G.rows();
  if (G.cols() != n || H.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != H.cols() ||
      R.cols() != H.cols()) {
    throw InvalidParameter("solve_dare: dimension mismatch");
  }
  Eigen::LLT<Eigen::Matrix<double, M, M>> r_llt(R);
  if (r_llt.info() != Eigen::Success) throw InvalidParameter("solve_dare: R must be positive definite");

  const MatN I = MatN::Identity(n, n);
  MatN a = G;
  MatN g = H * r_llt.solve(H.transpose());
  MatN h = Q;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::PartialPivLU<MatN> w(I + g * h);
    const MatN w_a = w.solve(a);
    const MatN w_g = w.solve(g);
    const MatN h_next = h + a.transpose() * h * w_a;
    g = g + a * w_g * a.transpose();
    a = a * w_a;
    const double change = (h_next - h).template lpNorm<Eigen::Infinity>();
    h = h_next;
    if (!h.allFinite()) throw NumericError("solve_dare: iteration diverged (pair not stabilizable?)");
    if (change <= opts.tolerance * std::max(1.0, h.template lpNorm<Eigen::Infinity>())) {
      ++it;
      break;
    }
  }
  if (it >= opts.max_iterations) throw NumericError("solve_dare: no convergence within iteration cap");

  RiccatiSolution<N, M> sol;
  auto gain = [&](const MatN& P) -> Eigen::Matrix<double, M, N> {
    const Eigen::Matrix<double, M, M> s = R + H.transpose() * P * H;
    return s.ldlt().solve(H.transpose() * P * G);
  };
  // closed-loop form in extended precision; errors in K enter only quadratically
  auto residual = [&](const MatN& P, const Eigen::Matrix<double, M, N>& K) -> MatN {
    using L = long double;
    const auto Kl = K.template cast<L>();
    const auto Pl = P.template cast<L>();
    const Eigen::Matrix<L, N, N> cl = G.template cast<L>() - H.template cast<L>() * Kl;
    const Eigen::Matrix<L, N, N> r =
        Q.template cast<L>() + cl.transpose() * Pl * cl + Kl.transpose() * R.template cast<L>() * Kl - Pl;
    return (0.5L * (r + r.transpose())).template cast<double>();
  };
  sol.P = 0.5 * (h + h.transpose());
  sol.K = gain(sol.P);
  MatN res = residual(sol.P, sol.K);
  sol.residual = res.template lpNorm<Eigen::Infinity>();

  // Newton (Hewer) defect correction: cl' X cl - X + res = 0, P <- P + X
  const double floor =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, sol.P.template lpNorm<Eigen::Infinity>());
  for (int step = 0; step < 3 && sol.residual > floor; ++step) {
    const MatN cl = G - H * sol.K;
    Eigen::MatrixXd stein = Eigen::MatrixXd::Identity(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) stein.block(i * n, j * n, n, n) -= cl(j, i) * cl.transpose();
    }
    const Eigen::VectorXd x = stein.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(res.data(), n * n));
    MatN P = sol.P + Eigen::Map<const MatN>(x.data(), n, n);
    P = 0.5 * (P + P.transpose());
    const auto K = gain(P);
    const MatN r = residual(P, K);
    const double norm = r.template lpNorm<Eigen::Infinity>();
    if (!(norm < sol.residual)) break;
    sol.P = P;
    sol.K = K;
    res = r;
    sol.residual = norm;
  }
  sol.iterations = it;

  const MatN closed = G - H * sol.K;
  bool stable = false;
  if constexpr (N == 3) {
    stable = is_schur_stable(closed);
  } else {
    stable = detail::spectral_radius_of(closed) < 1.0;
  }
  if (!stable) throw NumericError("solve_dare: no stabilizing solution (closed loop not Schur stable)");
  return sol;
}

/// Stabilizing solution of the continuous algebraic Riccati equation
///   A'P + PA - P B R^{-1} B' P + Q = 0
/// via the matrix sign function of the Hamiltonian. K = R^{-1} B' P.
template <int N, int M>
RiccatiSolution<N, M> solve_care(const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, M>& B,
                                 const Eigen::Matrix<double, N, N>& Q, const Eigen::Matrix<double, M, M>& R,
                                 const RiccatiOptions& opts = {})
{
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
      R.cols() != B.cols()) {
    throw InvalidParameter("solve_care: dimension mismatch");
  }
  Eigen::LLT<Eigen::Matrix<double, M, M>> r_llt(R);
  if (r_llt.info() != Eigen::Success) throw InvalidParameter("solve_care: R must be positive definite");

  Eigen::MatrixXd z(2 * n, 2 * n);
  z.topLeftCorner(n, n) = A;
  z.topRightCorner(n, n) = -(B * r_llt.solve(B.transpose()));
  z.bottomLeftCorner(n, n) = -Q;
  z.bottomRightCorner(n, n) = -A.transpose();

  int it = 0;
  bool scale = true;
  for (; it < opts.max_iterations; ++it) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(z);
    const double det = lu.determinant();
    if (!std::isfinite(det) || det == 0.0) {
      throw NumericError("solve_care: Hamiltonian has eigenvalues on the imaginary axis");
    }
    const double c = scale ? std::pow(std::abs(det), -1.0 / static_cast<double>(2 * n)) : 1.0;
    Eigen::MatrixXd next = 0.5 * (c * z + lu.inverse() / c);
    if (!next.allFinite()) throw NumericError("solve_care: sign iteration diverged");
    const double change = (next - z).lpNorm<1>();
    const double size = next.lpNorm<1>();
    z = std::move(next);
    if (change < 1e-2 * size) scale = false;
    if (change <= opts.tolerance * size) {
      ++it;
      break;
    }
  }
  if (it >= opts.max_iterations) throw NumericError("solve_care: no convergence within iteration cap");

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd lhs(2 * n, n);
  lhs << z.topRightCorner(n, n), z.bottomRightCorner(n, n) + I;
  Eigen::MatrixXd rhs(2 * n, n);
  rhs << z.topLeftCorner(n, n) + I, z.bottomLeftCorner(n, n);
  const Eigen::MatrixXd p = lhs.colPivHouseholderQr().solve(-rhs);

  RiccatiSolution<N, M> sol;
  sol.P = 0.5 * (p + p.transpose());
  sol.K = r_llt.solve(B.transpose() * sol.P);
  const Eigen::Matrix<double, N, N> res = A.transpose() * sol.P + sol.P * A - sol.P * B * sol.K + Q;
  sol.residual = res.template lpNorm<Eigen::Infinity>();
  sol.iterations = it;
  if (!sol.P.allFinite() || detail::max_real_eigenvalue(A - B * sol.K) >= 0.0) {
    throw NumericError("solve_care: no stabilizing solution");
  }
  return sol;
}

/// Discrete LQR gain for the plant under the given weights.
[[nodiscard]] Dare3 lqr_gain(const DiscreteSS& dss, const WeightSet& w, const RiccatiOptions& opts = {});

/// u = -K x. Saturation is the caller's concern.
[[nodiscard]] inline double lqr_control(const AccState& x, const Row3& K)
{
  return -K.dot(x.vector().transpose());
}

/// Averaged quadratic cost (1/N) sum x'Qx + r u^2 over aligned states/inputs.
/// Throws InvalidParameter on an empty or misaligned trajectory.
[[nodiscard]] double eval_cost(std::span<const Vec3> states, std::span<const double> inputs, const WeightSet& w);

/// Single-sample stage cost x'Qx + r u^2.
[[nodiscard]] inline double stage_cost(const Vec3& x, double u, const WeightSet& w)
{
  return w.rho1 * x(0) * x(0) + w.rho2 * x(1) * x(1) + w.rho3 * x(2) * x(2) + w.r * u * u;
}

}  // namespace acclab

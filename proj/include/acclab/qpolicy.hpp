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
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acclab/plant.hpp"
#include "acclab/riccati.hpp"

namespace acclab {

inline constexpr int kNumFeatures = 11;

using FeatureVector = Eigen::Matrix<double, kNumFeatures, 1>;

/// Quadratic Q-function weights; Q(x, u) = omega' phi(x, u).
struct QWeights {
  FeatureVector omega = FeatureVector::Zero();
};

/// phi = [1, x1^2, x1x2, x1x3, x1u, x2^2, x2x3, x2u, x3^2, x3u, u^2].
[[nodiscard]] FeatureVector features(const AccState& x, double u);

/// One-step penalty x'Qx + r u^2.
[[nodiscard]] double reward(const AccState& x, double u, const WeightSet& w);

struct Sample {
  AccState x;
  double u = 0.0;
  double r = 0.0;
  AccState x_next;
  double u_next = 0.0;  ///< action of the evaluated policy at x_next
};

/// Fixed-capacity sample window; the oldest sample is evicted when full.
class SampleBuffer {
 public:
  explicit SampleBuffer(std::size_t capacity);

  void push(const Sample& s);
  void clear() { samples_.clear(); }

  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] bool full() const { return samples_.size() == capacity_; }
  [[nodiscard]] const std::vector<Sample>& samples() const { return samples_; }

 private:
  std::size_t capacity_;
  std::vector<Sample> samples_;
};

/// Per-column statistics from standardize().
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

/// Population-statistics column standardisation (x - mean) / std. Columns
/// with std < 1e-12 map to zeros and record std = 1.
[[nodiscard]] std::pair<Eigen::MatrixXd, Scaler> standardize(const Eigen::MatrixXd& columns);

struct RidgeOptions {
  double lambda = 1e-4;
  bool standardize = true;
};

/// Least-squares fit of omega' (phi_k - phi_{k+1}) = r_k with an L2 penalty,
/// solved through a QR factorisation of the lambda-augmented system.
///
/// The bias feature cancels in the temporal difference, so omega_0 is
/// unidentifiable and is returned as 0. With lambda = 0 a rank-deficient
/// difference matrix raises NumericError.
[[nodiscard]] QWeights fit_ridge(const SampleBuffer& buffer, const RidgeOptions& opts = {});

/// Same fit on explicit rows (one difference vector per row) and targets.
[[nodiscard]] QWeights fit_ridge(const Eigen::MatrixXd& diff_rows, const Eigen::VectorXd& targets,
                                 const RidgeOptions& opts = {});

/// Greedy policy u = K x with K = -[omega4, omega7, omega9] / (2 omega10).
/// Throws NumericError when omega10 <= 0 (Q not convex in u).
[[nodiscard]] Row3 extract_policy(const QWeights& w);

/// Closed-loop sample source for policy evaluation: short episodes from
/// random initial states, each action dithered by zero-mean uniform noise.
struct ExplorationConfig {
  double dither = 0.05 * 9.81;      ///< half-width of the uniform dither [m/s^2]
  int episode_length = 25;          ///< steps before a random restart
  Vec3 initial_box{5.0, 2.0, 1.0};  ///< initial state drawn from [-box, box]
  double divergence_guard = 1e6;    ///< abort when |x| exceeds this
  std::uint64_t seed = 1;
};

class SampleGenerator {
 public:
  SampleGenerator(DiscreteSS dss, WeightSet weights, ExplorationConfig cfg);

  /// Fills the buffer with fresh samples under u = K x + dither.
  void collect(const Row3& policy_gain, SampleBuffer& buffer);

 private:
  DiscreteSS dss_;
  WeightSet weights_;
  ExplorationConfig cfg_;
  std::mt19937_64 rng_;
};

struct PolicyIterationOptions {
  int iterations = 20;
  std::size_t buffer_size = 200;
  double convergence = 1e-4;  ///< stop when max |K_{i+1} - K_i| is below this
  RidgeOptions ridge;
};

struct PolicyIterationResult {
  std::vector<Row3> gains;  ///< gains[0] is the initial policy
  QWeights last_weights;
  bool converged = false;
};

/// Alternates sample collection, ridge fit and greedy policy extraction.
/// Gains are in the u = K x convention. Throws InvalidParameter for an unusable
/// setup (buffer below 11 samples, zero dither) and NumericError when the fit
/// is ill-posed or the closed loop diverges.
[[nodiscard]] PolicyIterationResult policy_iteration(SampleGenerator& generator, const Row3& initial_gain,
                                                     const PolicyIterationOptions& opts);

/// Text record: 11 numbers on one line, shortest round-trip formatting.
void write_qweights(std::ostream& os, const QWeights& w);
[[nodiscard]] QWeights read_qweights(std::istream& is);

}  // namespace acclab

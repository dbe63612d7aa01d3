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

#include "acclab/qpolicy.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "acclab/errors.hpp"
#include "acclab/numfmt.hpp"

namespace acclab {

namespace {

constexpr double kDegenerateStd = 1e-12;
// The bias column is identically zero in temporal-difference rows.
constexpr int kSolved = kNumFeatures - 1;

}  // namespace

FeatureVector features(const AccState& x, double u)
{
  const double x1 = x.d_error;
  const double x2 = x.v_rel;
  const double x3 = x.a_f;
  FeatureVector phi;
  phi << 1.0, x1 * x1, x1 * x2, x1 * x3, x1 * u, x2 * x2, x2 * x3, x2 * u, x3 * x3, x3 * u, u * u;
  return phi;
}

double reward(const AccState& x, double u, const WeightSet& w)
{
  return stage_cost(x.vector(), u, w);
}

SampleBuffer::SampleBuffer(std::size_t capacity) : capacity_(capacity)
{
  if (capacity == 0) throw InvalidParameter("SampleBuffer: capacity must be > 0");
  samples_.reserve(capacity);
}

void SampleBuffer::push(const Sample& s)
{
  if (samples_.size() == capacity_) samples_.erase(samples_.begin());
  samples_.push_back(s);
}

std::pair<Eigen::MatrixXd, Scaler> standardize(const Eigen::MatrixXd& columns)
{
  if (columns.rows() < 2) throw InvalidParameter("standardize: need at least two rows");
  Scaler s;
  s.mean = columns.colwise().mean().transpose();
  const Eigen::MatrixXd centered = columns.rowwise() - s.mean.transpose();
  s.std = (centered.array().square().colwise().sum() / static_cast<double>(columns.rows())).sqrt().transpose();
  Eigen::MatrixXd scaled = centered;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    if (s.std(j) < kDegenerateStd) {
      s.std(j) = 1.0;
      scaled.col(j).setZero();
    } else {
      scaled.col(j) /= s.std(j);
    }
  }
  return {std::move(scaled), std::move(s)};
}

QWeights fit_ridge(const Eigen::MatrixXd& diff_rows, const Eigen::VectorXd& targets, const RidgeOptions& opts)
{
  if (diff_rows.cols() != kNumFeatures) throw InvalidParameter("fit_ridge: rows must have 11 features");
  if (diff_rows.rows() != targets.size()) throw InvalidParameter("fit_ridge: rows and targets misaligned");
  if (diff_rows.rows() < kNumFeatures) {
    throw InvalidParameter("fit_ridge: need at least 11 samples (one per predictor)");
  }
  if (!(opts.lambda >= 0.0) || !std::isfinite(opts.lambda)) throw InvalidParameter("fit_ridge: lambda must be >= 0");
  if (!diff_rows.allFinite() || !targets.allFinite()) throw NumericError("fit_ridge: non-finite samples");

  const Eigen::MatrixXd D = diff_rows.rightCols(kSolved);
  bool all_identical = true;
  for (Eigen::Index k = 1; k < D.rows() && all_identical; ++k) {
    all_identical = D.row(k) == D.row(0) && targets(k) == targets(0);
  }
  if (all_identical) throw NumericError("fit_ridge: degenerate buffer (all samples identical)");

  Eigen::MatrixXd Z;
  Eigen::VectorXd y;
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(kSolved);
  if (opts.standardize) {
    auto [z, scaler] = standardize(D);
    Z = std::move(z);
    scale = scaler.std;
    y = targets.array() - targets.mean();
  } else {
    Z = D;
    y = targets;
  }

  const Eigen::Index n = Z.rows();
  Eigen::VectorXd beta;
  if (opts.lambda > 0.0) {
    Eigen::MatrixXd aug(n + kSolved, kSolved);
    aug << Z, std::sqrt(opts.lambda) * Eigen::MatrixXd::Identity(kSolved, kSolved);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + kSolved);
    rhs.head(n) = y;
    beta = aug.householderQr().solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    if (qr.rank() < kSolved) {
      throw NumericError("fit_ridge: singular system (difference features are rank deficient; use lambda > 0)");
    }
    beta = qr.solve(y);
  }
  if (!beta.allFinite()) throw NumericError("fit_ridge: solve produced non-finite weights");

  QWeights w;
  w.omega(0) = 0.0;
  w.omega.tail(kSolved) = beta.cwiseQuotient(scale);
  return w;
}

QWeights fit_ridge(const SampleBuffer& buffer, const RidgeOptions& opts)
{
  const auto& samples = buffer.samples();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(samples.size()), kNumFeatures);
  Eigen::VectorXd targets(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Sample& s = samples[k];
    const auto i = static_cast<Eigen::Index>(k);
    rows.row(i) = (features(s.x, s.u) - features(s.x_next, s.u_next)).transpose();
    targets(i) = s.r;
  }
  return fit_ridge(rows, targets, opts);
}

Row3 extract_policy(const QWeights& w)
{
  const double w10 = w.omega(10);
  if (!(w10 > 0.0)) throw NumericError("extract_policy: omega10 <= 0, Q-function is not convex in u");
  return Row3(w.omega(4), w.omega(7), w.omega(9)) / (-2.0 * w10);
}

SampleGenerator::SampleGenerator(DiscreteSS dss, WeightSet weights, ExplorationConfig cfg)
    : dss_(std::move(dss)), weights_(weights), cfg_(cfg), rng_(cfg.seed)
{
  weights_.validate();
  if (cfg_.episode_length < 1) throw InvalidParameter("exploration: episode_length must be >= 1");
  if (!(cfg_.dither >= 0.0)) throw InvalidParameter("exploration: dither must be >= 0");
}

void SampleGenerator::collect(const Row3& policy_gain, SampleBuffer& buffer)
{
  buffer.clear();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec3 x = Vec3::Zero();
  int step = 0;
  while (!buffer.full()) {
    if (step % cfg_.episode_length == 0) {
      for (int i = 0; i < 3; ++i) x(i) = cfg_.initial_box(i) * unit(rng_);
    }
    const double dither = cfg_.dither > 0.0 ? cfg_.dither * unit(rng_) : 0.0;
    const double u = policy_gain.dot(x.transpose()) + dither;
    const Vec3 x_next = dss_.G * x + dss_.H * u;
    if (!x_next.allFinite() || x_next.cwiseAbs().maxCoeff() > cfg_.divergence_guard) {
      throw NumericError("policy iteration: closed loop diverged while collecting samples");
    }
    Sample s;
    s.x = AccState::from_vector(x);
    s.u = u;
    s.r = reward(s.x, u, weights_);
    s.x_next = AccState::from_vector(x_next);
    s.u_next = policy_gain.dot(x_next.transpose());
    buffer.push(s);
    x = x_next;
    ++step;
  }
}

PolicyIterationResult policy_iteration(SampleGenerator& generator, const Row3& initial_gain,
                                       const PolicyIterationOptions& opts)
{
  if (opts.iterations < 0) throw InvalidParameter("policy_iteration: iterations must be >= 0");
  if (opts.buffer_size < static_cast<std::size_t>(kNumFeatures)) {
    throw InvalidParameter("policy_iteration: buffer must hold at least 11 samples");
  }

  PolicyIterationResult result;
  result.gains.push_back(initial_gain);
  SampleBuffer buffer(opts.buffer_size);
  for (int i = 0; i < opts.iterations; ++i) {
    const Row3 K = result.gains.back();
    generator.collect(K, buffer);

    // Excitation check on the unregularised, standardised difference matrix.
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(buffer.size()), kSolved);
    for (std::size_t k = 0; k < buffer.size(); ++k) {
      const Sample& s = buffer.samples()[k];
      rows.row(static_cast<Eigen::Index>(k)) =
          (features(s.x, s.u) - features(s.x_next, s.u_next)).tail(kSolved).transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(standardize(rows).first);
    qr.setThreshold(1e-10);
    if (qr.rank() < kSolved) {
      throw NumericError("policy_iteration: insufficient excitation (difference features rank deficient)");
    }

    result.last_weights = fit_ridge(buffer, opts.ridge);
    const Row3 next = extract_policy(result.last_weights);
    result.gains.push_back(next);
    if ((next - K).cwiseAbs().maxCoeff() < opts.convergence) {
      result.converged = true;
      break;
    }
  }
  return result;
}

void write_qweights(std::ostream& os, const QWeights& w)
{
  for (int i = 0; i < kNumFeatures; ++i) {
    if (i) os << ' ';
    os << format_double(w.omega(i));
  }
  os << '\n';
}

QWeights read_qweights(std::istream& is)
{
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.front() != '#') break;
  }
  std::istringstream ss(line);
  QWeights w;
  std::string tok;
  int i = 0;
  while (ss >> tok) {
    if (i >= kNumFeatures) throw InvalidParameter("read_qweights: more than 11 numbers");
    w.omega(i++) = parse_double(tok);
  }
  if (i != kNumFeatures) throw InvalidParameter("read_qweights: expected 11 numbers");
  return w;
}

}  // namespace acclab

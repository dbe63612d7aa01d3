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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace acclab {

// ---------------------------------------------------------------------------
// Second-order prefilter wn^2 / (s^2 + 2 xi wn s + wn^2)

struct PrefilterState {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();  ///< [output, output rate]
  double wn = 10.0;                             ///< natural frequency [rad/s]
  double xi = 1.0;                              ///< damping ratio
};

/// One ZOH step of the prefilter; returns the updated state and its output.
[[nodiscard]] std::pair<PrefilterState, double> prefilter_step(const PrefilterState& state, double a_des,
                                                               double sample_time);

/// Same filter with the discretisation cached.
class Prefilter {
 public:
  Prefilter(double wn, double xi, double sample_time);
  double step(double input);
  void reset(double value = 0.0);
  [[nodiscard]] double output() const { return x_(0); }

 private:
  Eigen::Matrix2d ad_;
  Eigen::Vector2d bd_;
  Eigen::Vector2d x_ = Eigen::Vector2d::Zero();
};

// ---------------------------------------------------------------------------
// Fuzzy gain-scheduled PID (throttle)

enum class FuzzyLevel { S, M, B };

/// Triangle (left, peak, right). left == peak or peak == right makes a shoulder.
struct TriangularSet {
  double left = 0.0;
  double peak = 0.0;
  double right = 0.0;

  [[nodiscard]] double membership(double x) const;
};

using RuleTable = std::array<std::array<FuzzyLevel, 5>, 7>;

[[nodiscard]] const RuleTable& default_rule_p();
[[nodiscard]] const RuleTable& default_rule_i();

/// Parses seven 5-letter rows of S/M/B.
[[nodiscard]] RuleTable parse_rule_table(const std::vector<std::string>& rows);
[[nodiscard]] std::vector<std::string> format_rule_table(const RuleTable& t);

/// Evenly spaced triangles over [-1, 1] with shoulder ends.
[[nodiscard]] std::vector<TriangularSet> uniform_partition(int count);

struct FuzzyPidConfig {
  double k_fe = 0.5;                                          ///< error scaling [1/(m/s^2)]
  double k_fec = 0.1;                                         ///< error-rate scaling [1/(m/s^3)]
  double k_fp = 1.0;                                          ///< output scaling on u_fp
  double k_fi = 1.0;                                          ///< output scaling on u_fi
  double kd = 0.5;                                            ///< fixed derivative gain [% / (m/s^3)]
  std::array<double, 2> kp_range{6.0, 14.0};                  ///< [% / (m/s^2)]
  std::array<double, 2> ki_range{20.0, 80.0};                 ///< [% / (m/s^2 s)]
  std::vector<TriangularSet> e_sets = uniform_partition(7);   ///< NB NM NS ZO PS PM PB
  std::vector<TriangularSet> de_sets = uniform_partition(5);  ///< NB NS ZO PS PB
  std::array<double, 3> out_levels{0.0, 0.5, 1.0};            ///< S, M, B
  RuleTable rule_p = default_rule_p();
  RuleTable rule_i = default_rule_i();
  double sample_time = 0.05;

  void validate() const;
};

struct FuzzyOutput {
  double u_fp = 0.0;
  double u_fi = 0.0;
};

/// Product inference over the 35 rules with weighted-average
/// defuzzification of the S/M/B singletons. Inputs are clipped to [-1, 1].
[[nodiscard]] FuzzyOutput fuzzy_infer(double e_n, double de_n, const FuzzyPidConfig& cfg);

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
};

/// kp = kp_min + u_fp (kp_max - kp_min), likewise for ki.
[[nodiscard]] PidGains schedule_gains(const FuzzyOutput& f, const FuzzyPidConfig& cfg);

struct ZnRanges {
  std::array<double, 2> kp;
  std::array<double, 2> ki;
};

/// Ziegler-Nichols style ranges: kp in [0.3 ku, 0.7 ku], ki in [ku/Tu, ku/(0.25 Tu)].
[[nodiscard]] ZnRanges zn_ranges(double ku, double tu);

/// Positional PID with fuzzy-scheduled kp/ki, fixed kd, conditional
/// anti-windup and a [0, 100] % output clamp.
class ThrottleController {
 public:
  explicit ThrottleController(FuzzyPidConfig cfg);

  /// e = a_desired - a_real [m/s^2]; returns throttle [%].
  double step(double e);
  /// Clears history; the integrator is preloaded with `integrator`.
  void reset(double integrator = 0.0);
  void set_operating_point(double percent) { operating_point_ = percent; }

  [[nodiscard]] double operating_point() const { return operating_point_; }
  [[nodiscard]] double integrator() const { return integ_; }
  [[nodiscard]] const PidGains& last_gains() const { return gains_; }
  [[nodiscard]] double last_rate() const { return de_; }
  [[nodiscard]] bool saturated() const { return saturated_; }
  [[nodiscard]] const FuzzyPidConfig& config() const { return cfg_; }

 private:
  FuzzyPidConfig cfg_;
  double operating_point_ = 0.0;
  double integ_ = 0.0;
  double e_prev_ = 0.0;
  double de_ = 0.0;
  bool has_prev_ = false;
  bool saturated_ = false;
  PidGains gains_;
};

// ---------------------------------------------------------------------------
// Incremental PID (brake)

struct IncPidConfig {
  double Kp = 0.15;  ///< [effort / (m/s^2)]
  double Ti = 0.25;  ///< integral time [s]
  double Td = 0.0;   ///< derivative time [s]
  double T = 0.05;   ///< sample time [s]
  double u_min = 0.0;
  double u_max = 1.0;
  double rate_max = 0.1;  ///< max |u_k - u_{k-1}| per step

  void validate() const;
};

struct IncPidState {
  double e1 = 0.0;      ///< e_{k-1}
  double e2 = 0.0;      ///< e_{k-2}
  double u_prev = 0.0;  ///< u_{k-1} (after clamping)
};

/// Raw increment Kp (e_k - e_{k-1} + T/Ti e_k + Td/T (e_k - 2 e_{k-1} + e_{k-2})).
[[nodiscard]] double incremental_delta(double e, const IncPidState& s, const IncPidConfig& cfg);

/// Applies the increment with rate limit and clamp; returns the new state,
/// whose u_prev is the command for this step.
[[nodiscard]] IncPidState brake_step(double e, const IncPidState& s, const IncPidConfig& cfg);

}  // namespace acclab

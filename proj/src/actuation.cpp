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

#include "acclab/actuation.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "acclab/errors.hpp"

namespace acclab {

namespace {

void prefilter_matrices(double wn, double xi, double ts, Eigen::Matrix2d& ad, Eigen::Vector2d& bd)
{
  if (!(wn > 0.0) || !(xi > 0.0) || !(ts > 0.0)) {
    throw InvalidParameter("prefilter needs wn > 0, xi > 0 and a positive sample time");
  }
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 1) = 1.0;
  m(1, 0) = -wn * wn;
  m(1, 1) = -2.0 * xi * wn;
  m(1, 2) = wn * wn;
  const Eigen::Matrix3d e = (m * ts).exp();
  ad = e.topLeftCorner<2, 2>();
  bd = e.topRightCorner<2, 1>();
}

double level_value(FuzzyLevel l, const FuzzyPidConfig& cfg)
{
  return cfg.out_levels[static_cast<std::size_t>(l)];
}

}  // namespace

std::pair<PrefilterState, double> prefilter_step(const PrefilterState& state, double a_des, double sample_time)
{
  Eigen::Matrix2d ad;
  Eigen::Vector2d bd;
  prefilter_matrices(state.wn, state.xi, sample_time, ad, bd);
  PrefilterState next = state;
  next.x = ad * state.x + bd * a_des;
  return {next, next.x(0)};
}

Prefilter::Prefilter(double wn, double xi, double sample_time)
{
  prefilter_matrices(wn, xi, sample_time, ad_, bd_);
}

double Prefilter::step(double input)
{
  x_ = ad_ * x_ + bd_ * input;
  return x_(0);
}

void Prefilter::reset(double value)
{
  x_ << value, 0.0;
}

double TriangularSet::membership(double x) const
{
  if (x < left || x > right) return 0.0;
  if (x <= peak) return peak == left ? 1.0 : (x - left) / (peak - left);
  return right == peak ? 1.0 : (right - x) / (right - peak);
}

const RuleTable& default_rule_p()
{
  static const RuleTable t = parse_rule_table({"BBBBB", "MBBBM", "SMBMS", "SSMSS", "SMBMS", "MBBBM", "BBBBB"});
  return t;
}

const RuleTable& default_rule_i()
{
  static const RuleTable t = parse_rule_table({"SSSSS", "MSSSM", "BMSMB", "BBMBB", "BMSMB", "MSSSM", "SSSSS"});
  return t;
}

RuleTable parse_rule_table(const std::vector<std::string>& rows)
{
  if (rows.size() != 7) throw InvalidParameter("rule table needs 7 rows");
  RuleTable t{};
  for (std::size_t i = 0; i < 7; ++i) {
    if (rows[i].size() != 5) throw InvalidParameter("rule table rows need 5 entries");
    for (std::size_t j = 0; j < 5; ++j) {
      switch (rows[i][j]) {
        case 'S': t[i][j] = FuzzyLevel::S; break;
        case 'M': t[i][j] = FuzzyLevel::M; break;
        case 'B': t[i][j] = FuzzyLevel::B; break;
        default: throw InvalidParameter("rule table entries must be S, M or B");
      }
    }
  }
  return t;
}

std::vector<std::string> format_rule_table(const RuleTable& t)
{
  std::vector<std::string> rows;
  for (const auto& r : t) {
    std::string s;
    for (auto l : r) s += l == FuzzyLevel::S ? 'S' : (l == FuzzyLevel::M ? 'M' : 'B');
    rows.push_back(s);
  }
  return rows;
}

std::vector<TriangularSet> uniform_partition(int count)
{
  if (count < 2) throw InvalidParameter("partition needs at least two sets");
  // edges reuse the neighbouring peaks so each peak is the only one with weight
  std::vector<double> peaks;
  for (int i = 0; i < count; ++i) peaks.push_back(static_cast<double>(2 * i - (count - 1)) / (count - 1));
  std::vector<TriangularSet> sets;
  for (int i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    sets.push_back({i == 0 ? peaks[k] : peaks[k - 1], peaks[k], i == count - 1 ? peaks[k] : peaks[k + 1]});
  }
  return sets;
}

void FuzzyPidConfig::validate() const
{
  if (!(k_fe > 0.0) || !(k_fec > 0.0)) throw InvalidParameter("fuzzy input scalings must be positive");
  if (!(k_fp > 0.0) || !(k_fi > 0.0)) throw InvalidParameter("fuzzy output scalings must be positive");
  if (!(kd >= 0.0)) throw InvalidParameter("kd must be non-negative");
  if (!(kp_range[0] >= 0.0 && kp_range[0] <= kp_range[1])) throw InvalidParameter("bad kp range");
  if (!(ki_range[0] >= 0.0 && ki_range[0] <= ki_range[1])) throw InvalidParameter("bad ki range");
  if (e_sets.size() != 7 || de_sets.size() != 5) {
    throw InvalidParameter("fuzzy PID needs 7 error sets and 5 error-rate sets");
  }
  for (const auto* sets : {&e_sets, &de_sets}) {
    for (const auto& s : *sets) {
      if (!(s.left <= s.peak && s.peak <= s.right)) throw InvalidParameter("malformed membership triangle");
    }
    // coverage of [-1, 1]
    for (int k = 0; k <= 200; ++k) {
      const double x = -1.0 + 0.01 * k;
      double total = 0.0;
      for (const auto& s : *sets) total += s.membership(x);
      if (!(total > 0.0)) throw InvalidParameter("membership sets leave a gap in [-1, 1]");
    }
  }
  if (!(sample_time > 0.0)) throw InvalidParameter("sample time must be positive");
}

FuzzyOutput fuzzy_infer(double e_n, double de_n, const FuzzyPidConfig& cfg)
{
  if (!std::isfinite(e_n) || !std::isfinite(de_n)) throw InvalidParameter("fuzzy inputs must be finite");
  const double e = std::clamp(e_n, -1.0, 1.0);
  const double de = std::clamp(de_n, -1.0, 1.0);
  double num_p = 0.0, num_i = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    const double me = cfg.e_sets[i].membership(e);
    if (me == 0.0) continue;
    for (std::size_t j = 0; j < 5; ++j) {
      const double w = me * cfg.de_sets[j].membership(de);
      if (w == 0.0) continue;
      num_p += w * level_value(cfg.rule_p[i][j], cfg);
      num_i += w * level_value(cfg.rule_i[i][j], cfg);
      den += w;
    }
  }
  if (!(den > 0.0)) throw NumericError("no fuzzy rule fired");
  return {num_p / den, num_i / den};
}

PidGains schedule_gains(const FuzzyOutput& f, const FuzzyPidConfig& cfg)
{
  const double sp = std::clamp(cfg.k_fp * f.u_fp, 0.0, 1.0);
  const double si = std::clamp(cfg.k_fi * f.u_fi, 0.0, 1.0);
  return {cfg.kp_range[0] + sp * (cfg.kp_range[1] - cfg.kp_range[0]),
          cfg.ki_range[0] + si * (cfg.ki_range[1] - cfg.ki_range[0])};
}

ZnRanges zn_ranges(double ku, double tu)
{
  if (!(ku > 0.0) || !(tu > 0.0)) throw InvalidParameter("ultimate gain and period must be positive");
  return {{0.3 * ku, 0.7 * ku}, {ku / tu, ku / (0.25 * tu)}};
}

ThrottleController::ThrottleController(FuzzyPidConfig cfg) : cfg_(std::move(cfg))
{
  cfg_.validate();
}

void ThrottleController::reset(double integrator)
{
  integ_ = integrator;
  e_prev_ = 0.0;
  de_ = 0.0;
  has_prev_ = false;
  saturated_ = false;
}

double ThrottleController::step(double e)
{
  if (!std::isfinite(e)) throw InvalidParameter("throttle error must be finite");
  de_ = has_prev_ ? (e - e_prev_) / cfg_.sample_time : 0.0;
  e_prev_ = e;
  has_prev_ = true;

  gains_ = schedule_gains(fuzzy_infer(cfg_.k_fe * e, cfg_.k_fec * de_, cfg_), cfg_);
  const double base = operating_point_ + gains_.kp * e + cfg_.kd * de_;
  const double trial = integ_ + e * cfg_.sample_time;
  const double u_trial = base + gains_.ki * trial;
  // integrate only when it does not push further into a rail
  const bool winding = (u_trial > 100.0 && e > 0.0) || (u_trial < 0.0 && e < 0.0);
  if (!winding) integ_ = trial;
  const double u = base + gains_.ki * integ_;
  saturated_ = u > 100.0 || u < 0.0;
  return std::clamp(u, 0.0, 100.0);
}

void IncPidConfig::validate() const
{
  if (!(Kp >= 0.0)) throw InvalidParameter("brake Kp must be non-negative");
  if (!(Ti > 0.0) || !(T > 0.0)) throw InvalidParameter("brake Ti and T must be positive");
  if (!(Td >= 0.0)) throw InvalidParameter("brake Td must be non-negative");
  if (!(u_min < u_max)) throw InvalidParameter("brake output range is empty");
  if (!(rate_max > 0.0)) throw InvalidParameter("brake rate limit must be positive");
}

double incremental_delta(double e, const IncPidState& s, const IncPidConfig& cfg)
{
  return cfg.Kp * ((e - s.e1) + cfg.T / cfg.Ti * e + cfg.Td / cfg.T * (e - 2.0 * s.e1 + s.e2));
}

IncPidState brake_step(double e, const IncPidState& s, const IncPidConfig& cfg)
{
  if (!std::isfinite(e)) throw InvalidParameter("brake error must be finite");
  const double du = std::clamp(incremental_delta(e, s, cfg), -cfg.rate_max, cfg.rate_max);
  IncPidState next;
  next.u_prev = std::clamp(s.u_prev + du, cfg.u_min, cfg.u_max);
  next.e1 = e;
  next.e2 = s.e1;
  return next;
}

}  // namespace acclab

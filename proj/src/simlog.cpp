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

#include "acclab/simlog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "acclab/errors.hpp"
#include "acclab/numfmt.hpp"

namespace acclab {

namespace {

bool same(double a, double b)
{
  return a == b || (std::isnan(a) && std::isnan(b));
}

bool same(const AccState& a, const AccState& b)
{
  return same(a.d_error, b.d_error) && same(a.v_rel, b.v_rel) && same(a.a_f, b.a_f);
}

ActuatorMode parse_act(const std::string& s)
{
  for (auto m : {ActuatorMode::Throttle, ActuatorMode::Brake, ActuatorMode::Coast}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidParameter("bad actuator mode '" + s + "'");
}

ControlMode parse_ctl(const std::string& s)
{
  if (s == "CCS") return ControlMode::CCS;
  if (s == "ACC") return ControlMode::ACC;
  throw InvalidParameter("bad control mode '" + s + "'");
}

}  // namespace

bool same_record(const LogRecord& a, const LogRecord& b)
{
  return same(a.t, b.t) && same(a.truth, b.truth) && same(a.meas, b.meas) && same(a.est, b.est) &&
         a.region == b.region && same(a.weights.rho1, b.weights.rho1) && same(a.weights.rho2, b.weights.rho2) &&
         same(a.weights.rho3, b.weights.rho3) && same(a.weights.r, b.weights.r) && same(a.u_des, b.u_des) &&
         a.act_mode == b.act_mode && a.ctl_mode == b.ctl_mode && same(a.throttle_pct, b.throttle_pct) &&
         same(a.brake_effort, b.brake_effort) && same(a.a_p, b.a_p);
}

void SimLog::append(const LogRecord& r)
{
  if (!records.empty() && !(r.t > records.back().t)) throw InvalidParameter("log time must increase");
  records.push_back(r);
}

bool same_records(const SimLog& a, const SimLog& b)
{
  return a.records.size() == b.records.size() &&
         std::equal(a.records.begin(), a.records.end(), b.records.begin(), same_record);
}

std::vector<ModeTransition> transitions(const SimLog& log)
{
  std::vector<ModeTransition> out;
  for (std::size_t k = 1; k < log.records.size(); ++k) {
    const auto& p = log.records[k - 1];
    const auto& c = log.records[k];
    if (p.ctl_mode != c.ctl_mode) {
      out.push_back({c.t, true, std::string(to_string(p.ctl_mode)), std::string(to_string(c.ctl_mode))});
    }
    if (p.act_mode != c.act_mode) {
      out.push_back({c.t, false, std::string(to_string(p.act_mode)), std::string(to_string(c.act_mode))});
    }
  }
  return out;
}

Metrics compute_metrics(const SimLog& log)
{
  if (log.empty()) throw InvalidParameter("cannot compute metrics of an empty log");
  Metrics m;
  m.steps = log.size();
  double sum_d = 0.0, sum_v2 = 0.0;
  std::size_t n_target = 0;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& r = log.records[k];
    if (!std::isnan(r.truth.d_error)) {
      m.max_abs_d_error = std::max(m.max_abs_d_error, std::abs(r.truth.d_error));
      sum_d += std::abs(r.truth.d_error);
      sum_v2 += r.truth.v_rel * r.truth.v_rel;
      ++n_target;
    }
    m.max_abs_a_f_g = std::max(m.max_abs_a_f_g, std::abs(r.truth.a_f) / kGravity);
    if (k > 0) {
      const double jerk = (r.truth.a_f - log.records[k - 1].truth.a_f) / log.sample_time;
      m.max_abs_jerk = std::max(m.max_abs_jerk, std::abs(jerk));
      m.control_switches += r.ctl_mode != log.records[k - 1].ctl_mode;
      m.actuator_switches += r.act_mode != log.records[k - 1].act_mode;
    }
  }
  if (n_target > 0) {
    m.mean_abs_d_error = sum_d / static_cast<double>(n_target);
    m.rms_v_rel = std::sqrt(sum_v2 / static_cast<double>(n_target));
  }
  if (!log.compute_us.empty()) {
    double s = 0.0;
    for (double c : log.compute_us) s += c;
    m.mean_compute_us = s / static_cast<double>(log.compute_us.size());
  }
  return m;
}

void write_metrics_text(std::ostream& os, const Metrics& m)
{
  os << "steps = " << m.steps << '\n'
     << "max_abs_d_error = " << format_double(m.max_abs_d_error) << '\n'
     << "mean_abs_d_error = " << format_double(m.mean_abs_d_error) << '\n'
     << "rms_v_rel = " << format_double(m.rms_v_rel) << '\n'
     << "max_abs_a_f_g = " << format_double(m.max_abs_a_f_g) << '\n'
     << "max_abs_jerk = " << format_double(m.max_abs_jerk) << '\n'
     << "control_switches = " << m.control_switches << '\n'
     << "actuator_switches = " << m.actuator_switches << '\n';
}

const std::vector<std::string>& csv_columns()
{
  static const std::vector<std::string> cols{
      "t",           "d_error",   "v_rel",    "a_f",      "d_error_meas", "v_rel_meas",   "a_f_meas",
      "d_error_hat", "v_rel_hat", "a_f_hat",  "region",   "rho1",         "rho2",         "rho3",
      "r",           "u_des",     "act_mode", "ctl_mode", "throttle_pct", "brake_effort", "a_p"};
  return cols;
}

void write_csv(std::ostream& os, const SimLog& log)
{
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : log.records) {
    const double nums[] = {r.t,          r.truth.d_error, r.truth.v_rel, r.truth.a_f, r.meas.d_error,
                           r.meas.v_rel, r.meas.a_f,      r.est.d_error, r.est.v_rel, r.est.a_f};
    for (std::size_t i = 0; i < std::size(nums); ++i) os << (i ? "," : "") << format_double(nums[i]);
    os << ',' << r.region << ',' << format_double(r.weights.rho1) << ',' << format_double(r.weights.rho2) << ','
       << format_double(r.weights.rho3) << ',' << format_double(r.weights.r) << ',' << format_double(r.u_des) << ','
       << to_string(r.act_mode) << ',' << to_string(r.ctl_mode) << ',' << format_double(r.throttle_pct) << ','
       << format_double(r.brake_effort) << ',' << format_double(r.a_p) << '\n';
  }
}

SimLog read_csv(std::istream& is, double sample_time)
{
  SimLog log;
  log.sample_time = sample_time;
  std::string line;
  if (!std::getline(is, line)) throw InvalidParameter("CSV is missing its header");
  {
    std::vector<std::string> header;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
    if (header != csv_columns()) throw InvalidParameter("CSV header does not match the expected columns");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != csv_columns().size()) {
      throw InvalidParameter("CSV line " + std::to_string(lineno) + " has the wrong number of fields");
    }
    try {
      LogRecord r;
      r.t = parse_double(f[0]);
      r.truth = {parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
      r.meas = {parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
      r.est = {parse_double(f[7]), parse_double(f[8]), parse_double(f[9])};
      r.region = std::stoi(f[10]);
      r.weights = {parse_double(f[11]), parse_double(f[12]), parse_double(f[13]), parse_double(f[14])};
      r.u_des = parse_double(f[15]);
      r.act_mode = parse_act(f[16]);
      r.ctl_mode = parse_ctl(f[17]);
      r.throttle_pct = parse_double(f[18]);
      r.brake_effort = parse_double(f[19]);
      r.a_p = parse_double(f[20]);
      log.append(r);
    } catch (const std::logic_error& e) {
      throw InvalidParameter("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

void export_csv(const SimLog& log, const std::filesystem::path& path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(os, log);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

SimLog import_csv(const std::filesystem::path& path, double sample_time)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_csv(is, sample_time);
}

}  // namespace acclab

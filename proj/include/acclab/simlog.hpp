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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "acclab/plant.hpp"
#include "acclab/riccati.hpp"
#include "acclab/supervisor.hpp"

namespace acclab {

/// One control tick. Channels without a target in view hold NaN.
struct LogRecord {
  double t = 0.0;
  AccState truth;
  AccState meas;
  AccState est;
  int region = 0;  ///< phase-plane region, 0 when not applicable
  WeightSet weights;
  double u_des = 0.0;  ///< upper-level command after the envelope clamp [m/s^2]
  ActuatorMode act_mode = ActuatorMode::Coast;
  ControlMode ctl_mode = ControlMode::CCS;
  double throttle_pct = 0.0;
  double brake_effort = 0.0;
  double a_p = 0.0;
};

/// NaN-aware exact equality.
[[nodiscard]] bool same_record(const LogRecord& a, const LogRecord& b);

struct ModeTransition {
  double t = 0.0;
  bool control = true;  ///< CCS/ACC switch, otherwise throttle/brake/coast
  std::string from;
  std::string to;
};

struct SimLog {
  double sample_time = 0.05;
  std::vector<LogRecord> records;
  /// Side channels, not part of the CSV.
  std::vector<double> compute_us;  ///< upper-controller time per tick
  std::vector<double> gap;         ///< true gap [m], NaN without target
  std::vector<double> v_f;         ///< follower speed [m/s]
  std::vector<Vec3> innovation;    ///< filter innovation, filtered ticks after the first fix

  void append(const LogRecord& r);
  [[nodiscard]] bool empty() const { return records.empty(); }
  [[nodiscard]] std::size_t size() const { return records.size(); }
};

/// Compares the CSV-visible part of two logs.
[[nodiscard]] bool same_records(const SimLog& a, const SimLog& b);

/// Mode switches in time order, derived from the records.
[[nodiscard]] std::vector<ModeTransition> transitions(const SimLog& log);

struct Metrics {
  double max_abs_d_error = 0.0;   ///< [m]
  double mean_abs_d_error = 0.0;  ///< [m]
  double rms_v_rel = 0.0;         ///< [m/s]
  double max_abs_a_f_g = 0.0;     ///< [g]
  double max_abs_jerk = 0.0;      ///< [m/s^3]
  int control_switches = 0;
  int actuator_switches = 0;
  double mean_compute_us = 0.0;
  std::size_t steps = 0;
};

/// Throws InvalidParameter on an empty log.
[[nodiscard]] Metrics compute_metrics(const SimLog& log);

/// key = value lines.
void write_metrics_text(std::ostream& os, const Metrics& m);

[[nodiscard]] const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& os, const SimLog& log);
[[nodiscard]] SimLog read_csv(std::istream& is, double sample_time = 0.05);
/// Throws std::runtime_error on I/O failure.
void export_csv(const SimLog& log, const std::filesystem::path& path);
[[nodiscard]] SimLog import_csv(const std::filesystem::path& path, double sample_time = 0.05);

}  // namespace acclab

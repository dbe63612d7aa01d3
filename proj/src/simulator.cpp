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

#include "acclab/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "acclab/errors.hpp"

namespace acclab {

std::string_view to_string(ControllerKind k)
{
  switch (k) {
    case ControllerKind::LQR: return "lqr";
    case ControllerKind::LQG: return "lqg";
    case ControllerKind::ALQG: return "alqg";
    case ControllerKind::QPolicy: return "qpolicy";
    case ControllerKind::MPC: return "mpc";
  }
  return "?";
}

const std::vector<ControllerKind>& all_controllers()
{
  static const std::vector<ControllerKind> all{ControllerKind::LQR, ControllerKind::LQG, ControllerKind::ALQG,
                                               ControllerKind::QPolicy, ControllerKind::MPC};
  return all;
}

ControllerKind parse_controller(std::string_view name)
{
  for (auto k : all_controllers()) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParameter("unknown controller '" + std::string(name) + "' (valid: lqr, lqg, alqg, qpolicy, mpc)");
}

void ActuatorMap::validate() const
{
  if (!(a_throttle_max > 0.0) || !(a_brake_max > 0.0)) {
    throw InvalidParameter("actuator authority must be positive");
  }
}

void SimConfig::validate() const
{
  plant.validate();
  lqr.validate();
  kalman.validate();
  alqg.validate();
  mpc.validate();
  lower.throttle.validate();
  lower.brake.validate();
  lower.vehicle.validate();
  if (!(lower.prefilter_wn > 0.0) || !(lower.prefilter_xi > 0.0)) {
    throw InvalidParameter("prefilter needs positive wn and xi");
  }
  switching.validate();
  if (qpolicy.learning.iterations < 0) throw InvalidParameter("learning iterations must be non-negative");
  if (!(qpolicy.initial_gain_scale > 0.0)) throw InvalidParameter("initial gain scale must be positive");
  if (!(u_limit > 0.0)) throw InvalidParameter("u_limit must be positive");
  if (!(blowup > 0.0)) throw InvalidParameter("blow-up bound must be positive");
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

class LqrUpper : public UpperController {
 public:
  LqrUpper(const DiscreteSS& dss, const WeightSet& w, bool filtered)
      : w_(w), K_(lqr_gain(dss, w).K), filtered_(filtered)
  {
  }
  double command(const AccState& x, double) override { return lqr_control(x, K_); }
  bool uses_filter() const override { return filtered_; }
  WeightSet weights() const override { return w_; }

 private:
  WeightSet w_;
  Row3 K_;
  bool filtered_;
};

class AlqgUpper : public UpperController {
 public:
  AlqgUpper(const DiscreteSS& dss, const AlqgConfig& cfg, const WeightSet& initial) : ctl_(dss, cfg, initial) {}
  double command(const AccState& x, double a_p) override { return ctl_.step(x, a_p); }
  void reset() override { ctl_.reset(); }
  bool uses_filter() const override { return true; }
  WeightSet weights() const override { return ctl_.weights(); }
  int region() const override { return ctl_.region().id; }
  void report(RunDiagnostics& d) const override
  {
    d.alqg_retunes = ctl_.retunes();
    d.alqg_fallbacks = ctl_.fallbacks();
  }

 private:
  AlqgController ctl_;
};

class QPolicyUpper : public UpperController {
 public:
  QPolicyUpper(const Row3& K, const WeightSet& w) : K_(K), w_(w) {}
  double command(const AccState& x, double) override { return K_.dot(x.vector().transpose()); }
  bool uses_filter() const override { return true; }
  WeightSet weights() const override { return w_; }

 private:
  Row3 K_;
  WeightSet w_;
};

class MpcUpper : public UpperController {
 public:
  MpcUpper(const DiscreteSS& dss, const MpcConfig& cfg) : ctl_(dss, cfg) {}
  double command(const AccState& x, double) override
  {
    const MpcResult r = ctl_.step(x.vector());
    if (!r.converged) ++unconverged_;
    return r.u;
  }
  void reset() override { ctl_.reset(); }
  bool uses_filter() const override { return false; }
  WeightSet weights() const override { return ctl_.config().weights; }
  void report(RunDiagnostics& d) const override { d.mpc_unconverged = unconverged_; }

 private:
  MpcController ctl_;
  int unconverged_ = 0;
};

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Row3 learn_policy_gain(const DiscreteSS& dss, const SimConfig& cfg)
{
  const Row3 k_dare = lqr_gain(dss, cfg.lqr).K;
  SampleGenerator gen(dss, cfg.lqr, cfg.qpolicy.exploration);
  const auto res = policy_iteration(gen, -cfg.qpolicy.initial_gain_scale * k_dare, cfg.qpolicy.learning);
  return res.gains.back();
}

std::unique_ptr<UpperController> make_upper(ControllerKind kind, const DiscreteSS& dss, const SimConfig& cfg)
{
  switch (kind) {
    case ControllerKind::LQR: return std::make_unique<LqrUpper>(dss, cfg.lqr, false);
    case ControllerKind::LQG: return std::make_unique<LqrUpper>(dss, cfg.lqr, true);
    case ControllerKind::ALQG: return std::make_unique<AlqgUpper>(dss, cfg.alqg, cfg.lqr);
    case ControllerKind::QPolicy: return std::make_unique<QPolicyUpper>(learn_policy_gain(dss, cfg), cfg.lqr);
    case ControllerKind::MPC: return std::make_unique<MpcUpper>(dss, cfg.mpc);
  }
  throw InvalidParameter("unknown controller kind");
}

SimLog run(const Scenario& sc, ControllerKind kind, const SimConfig& cfg_in, RunDiagnostics* diag)
{
  sc.validate();
  cfg_in.validate();
  SimConfig cfg = cfg_in;
  const double T = cfg.plant.sample_time;
  cfg.lower.throttle.sample_time = T;
  cfg.lower.brake.T = T;
  const PlantParams& plant = cfg.plant;
  const DiscreteSS dss = discretize(plant);
  const auto& prof = sc.profile;
  const auto& sw = cfg.switching;
  SwitchConfig sw_run = sw;
  sw_run.v_set = sc.v_set;

  auto upper = make_upper(kind, dss, cfg);
  const bool filtered = upper->uses_filter();
  KalmanFilter kf(dss, cfg.kalman);
  Prefilter prefilter(cfg.lower.prefilter_wn, cfg.lower.prefilter_xi, T);
  ThrottleController throttle(cfg.lower.throttle);
  IncPidState brake_state;
  double brake_ff_prev = 0.0;
  CcsState ccs;

  std::mt19937_64 meas_rng(substream_seed(sc.seed, 0));
  std::mt19937_64 proc_rng(substream_seed(sc.seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto steps = static_cast<long>(std::llround(sc.duration / T));
  SimLog log;
  log.sample_time = T;
  log.records.reserve(static_cast<std::size_t>(steps) + 1);

  RunDiagnostics d;
  d.min_gap = std::numeric_limits<double>::infinity();

  double v_f = sc.v_f0;
  double a_f = 0.0;
  double gap = kNaN;
  double lead_offset = 0.0;  // integrated lead process noise [m/s]
  bool had_target = false;
  ControlMode ctl = ControlMode::CCS;
  ActuatorMode act = ActuatorMode::Coast;
  double u_prev = 0.0;
  double throttle_pct = 0.0;
  double brake = 0.0;

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * T;
    const bool present = target_present(prof, t);
    const double v_p = present ? *profile_velocity(prof, t, sc.duration) + lead_offset : kNaN;

    if (present && !had_target) {
      if (k == 0) {
        gap = sc.gap0 > 0.0 ? sc.gap0 : desired_distance(v_f, plant);
      } else {
        gap = prof.cut_in_gap > 0.0 ? prof.cut_in_gap : 0.7 * desired_distance(v_f, plant);
      }
      kf.reset();
      upper->reset();
    }
    if (!present) {
      gap = kNaN;
      if (had_target) kf.reset();
    }
    had_target = present;

    AccState truth{present ? desired_distance(v_f, plant) - gap : kNaN, present ? v_p - v_f : kNaN, a_f};

    // sensors
    Vec3 noise = Vec3::Zero();
    if (sc.noise.enabled) {
      for (int i = 0; i < 3; ++i) noise(i) = sc.noise.meas_std[static_cast<std::size_t>(i)] * normal(meas_rng);
    }
    const AccState meas = AccState::from_vector(truth.vector() + noise);
    const double a_p_hint = profile_accel(prof, t);

    AccState est{kNaN, kNaN, kNaN};
    if (filtered && present) {
      const bool fresh = !kf.initialized();
      est = AccState::from_vector(kf.step(meas.vector(), a_p_hint));
      if (!fresh) log.innovation.push_back(kf.last_innovation());
    }
    const AccState& x_ctl = filtered && present ? est : meas;

    // CCS / ACC
    const ControlMode prev_ctl = ctl;
    if (!present) {
      ctl = ControlMode::CCS;
    } else if (sc.acc_only) {
      ctl = ControlMode::ACC;
    } else {
      const double d_des = desired_distance(v_f, plant);
      ctl = mode_select(d_des - x_ctl.d_error, d_des, v_f, v_f + x_ctl.v_rel, ctl, sw_run);
    }

    double u = 0.0;
    if (ctl == ControlMode::ACC) {
      const auto t0 = std::chrono::steady_clock::now();
      u = upper->command(x_ctl, a_p_hint);
      const auto t1 = std::chrono::steady_clock::now();
      log.compute_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    } else {
      if (prev_ctl != ControlMode::CCS && sw_run.ccs_ki > 0.0) {
        // bumpless entry: start from the last command
        ccs.integ = (u_prev - sw_run.ccs_kp * (sw_run.v_set - v_f)) / sw_run.ccs_ki;
      }
      u = ccs_control(v_f, sw_run, ccs, T);
    }
    if (!std::isfinite(u)) throw NumericError("upper controller produced a non-finite command");
    const double u_des = std::clamp(u, -cfg.u_limit, cfg.u_limit);
    u_prev = u_des;
    d.max_abs_u = std::max(d.max_abs_u, std::abs(u_des));

    // lower level
    const double a_ref = prefilter.step(u_des);
    const double coast = coast_decel(v_f, sw);
    const ActuatorMode prev_act = act;
    act = actuator_select(a_ref, v_f, act, sw);
    const double a_real = x_ctl.a_f;
    const auto& veh = cfg.lower.vehicle;
    if (act == ActuatorMode::Throttle) {
      if (prev_act != ActuatorMode::Throttle) throttle.reset();
      throttle.set_operating_point(std::clamp((a_ref - coast) / veh.a_throttle_max * 100.0, 0.0, 100.0));
      throttle_pct = throttle.step(a_ref - a_real);
      brake = 0.0;
    } else if (act == ActuatorMode::Brake) {
      const double ff = std::clamp((coast - a_ref) / veh.a_brake_max, 0.0, 1.0);
      if (prev_act != ActuatorMode::Brake) {
        brake_state = IncPidState{};
        brake_state.u_prev = ff;
      } else {
        brake_state.u_prev =
            std::clamp(brake_state.u_prev + ff - brake_ff_prev, cfg.lower.brake.u_min, cfg.lower.brake.u_max);
      }
      brake_ff_prev = ff;
      brake_state = brake_step(a_real - a_ref, brake_state, cfg.lower.brake);
      brake = brake_state.u_prev;
      throttle_pct = 0.0;
    } else if (!sw.hold_in_dead_zone) {
      throttle_pct = 0.0;
      brake = 0.0;
    }
    const double a_cmd = coast + throttle_pct / 100.0 * veh.a_throttle_max - brake * veh.a_brake_max;
    if (filtered && present) kf.set_applied_input(a_cmd);

    // lead motion over the coming interval
    const double w = sc.noise.enabled ? sc.noise.process_std * normal(proc_rng) : 0.0;
    double a_p_eff = 0.0;
    if (present) {
      a_p_eff = (lead_speed(prof, t + T) - lead_speed(prof, t)) / T + w;
    }

    LogRecord rec;
    rec.t = t;
    rec.truth = truth;
    rec.meas = meas;
    rec.est = est;
    rec.region = ctl == ControlMode::ACC ? upper->region() : 0;
    rec.weights = upper->weights();
    rec.u_des = u_des;
    rec.act_mode = act;
    rec.ctl_mode = ctl;
    rec.throttle_pct = throttle_pct;
    rec.brake_effort = brake;
    rec.a_p = a_p_eff;
    log.append(rec);
    log.gap.push_back(gap);
    log.v_f.push_back(v_f);
    if (present) {
      d.min_gap = std::min(d.min_gap, gap);
      if (gap <= 0.0) d.collision = true;
    }
    if (k == steps) break;

    // truth propagation
    double v_f1 = v_f + follower_speed_increment(a_f, a_cmd, plant);
    double a_f1 = follower_accel_step(a_f, a_cmd, plant);
    if (present) {
      const AccState x1 = step_truth(truth, a_cmd, a_p_eff, dss);
      // gap from the spacing identity, valid before any standstill clamp
      gap = plant.tau_h * v_f1 + plant.d0 - x1.d_error;
      a_f1 = x1.a_f;
    }
    if (v_f1 < 0.0) {
      v_f1 = 0.0;
      a_f1 = std::max(a_f1, 0.0);
    }
    v_f = v_f1;
    a_f = a_f1;
    lead_offset += w * T;
    if (!(std::abs(v_f) < cfg.blowup) || !(std::abs(a_f) < cfg.blowup) || (present && !(std::abs(gap) < cfg.blowup))) {
      std::ostringstream msg;
      msg << "state diverged at t = " << t + T << " s (v_f = " << v_f << ", a_f = " << a_f << ", gap = " << gap << ")";
      throw NumericError(msg.str());
    }
  }
  if (d.min_gap == std::numeric_limits<double>::infinity()) d.min_gap = kNaN;
  upper->report(d);
  if (diag) *diag = d;
  return log;
}

}  // namespace acclab

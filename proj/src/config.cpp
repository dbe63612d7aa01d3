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

#include "acclab/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "acclab/errors.hpp"

namespace acclab {

namespace {

Json mat_json(const Mat3& m)
{
  Json a = Json::array();
  for (int i = 0; i < 3; ++i) a.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return a;
}

Json weights_json(const WeightSet& w)
{
  return {{"rho1", w.rho1}, {"rho2", w.rho2}, {"rho3", w.rho3}, {"r", w.r}};
}

Json sets_json(const std::vector<TriangularSet>& sets)
{
  Json a = Json::array();
  for (const auto& s : sets) a.push_back({s.left, s.peak, s.right});
  return a;
}

Json bounds_json(const BoundsTable& t)
{
  Json o = Json::object();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& b = t[i];
    o[std::to_string(i + 1)] = {{"rho1", {b.rho1.lo, b.rho1.hi}},
                                {"rho2", {b.rho2.lo, b.rho2.hi}},
                                {"rho3", {b.rho3.lo, b.rho3.hi}},
                                {"r", {b.r.lo, b.r.hi}},
                                {"floor", b.floor}};
  }
  return o;
}

std::string join(const std::string& path, const std::string& key)
{
  return path.empty() ? key : path + "." + key;
}

bool same_kind(const Json& a, const Json& b)
{
  if (a.is_number() && b.is_number()) return true;
  if (a.is_null() || b.is_null()) return true;  // null stands for "unbounded" fields
  return a.type() == b.type();
}

/// Layers `patch` over `base`, rejecting keys that base does not know.
void merge_strict(Json& base, const Json& patch, const std::string& path)
{
  if (!patch.is_object()) throw ConfigError("'" + (path.empty() ? "<root>" : path) + "' must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string where = join(path, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + where + "'");
    Json& slot = base[key];
    if (slot.is_object() && !slot.empty()) {
      merge_strict(slot, value, where);
    } else {
      if (!same_kind(slot, value)) throw ConfigError("config key '" + where + "' has the wrong type");
      slot = value;
    }
  }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& path)
{
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + join(path, key) + "' is missing or has the wrong type");
  }
}

double get_or_inf(const Json& j, const char* key, const std::string& path)
{
  if (j.contains(key) && j.at(key).is_null()) return std::numeric_limits<double>::infinity();
  return get<double>(j, key, path);
}

Mat3 get_mat(const Json& j, const char* key, const std::string& path)
{
  const auto rows = get<std::vector<std::vector<double>>>(j, key, path);
  if (rows.size() != 3) throw ConfigError("'" + join(path, key) + "' must be 3x3");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != 3) throw ConfigError("'" + join(path, key) + "' must be 3x3");
    for (int c = 0; c < 3; ++c) m(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }
  return m;
}

std::array<double, 2> get_pair(const Json& j, const char* key, const std::string& path)
{
  const auto v = get<std::vector<double>>(j, key, path);
  if (v.size() != 2) throw ConfigError("'" + join(path, key) + "' must be [lo, hi]");
  return {v[0], v[1]};
}

WeightSet get_weights(const Json& j, const std::string& path)
{
  return {get<double>(j, "rho1", path), get<double>(j, "rho2", path), get<double>(j, "rho3", path),
          get<double>(j, "r", path)};
}

std::vector<TriangularSet> get_sets(const Json& j, const char* key, const std::string& path)
{
  const auto rows = get<std::vector<std::vector<double>>>(j, key, path);
  std::vector<TriangularSet> out;
  for (const auto& r : rows) {
    if (r.size() != 3) throw ConfigError("'" + join(path, key) + "' entries must be [left, peak, right]");
    out.push_back({r[0], r[1], r[2]});
  }
  return out;
}

SimConfig parse_sim(const Json& doc)
{
  SimConfig c;
  const Json& p = doc.at("plant");
  c.plant.tau_h = get<double>(p, "tau_h", "plant");
  c.plant.d0 = get<double>(p, "d0", "plant");
  c.plant.t_lag = get<double>(p, "t_lag", "plant");
  c.plant.k_gain = get<double>(p, "k_gain", "plant");
  c.plant.sample_time = get<double>(p, "sample_time", "plant");

  c.lqr = get_weights(doc.at("lqr"), "lqr");

  const Json& e = doc.at("estimator");
  c.kalman.Q_K = get_mat(e, "q_k", "estimator");
  c.kalman.R_K = get_mat(e, "r_k", "estimator");
  c.kalman.H = get_mat(e, "h", "estimator");

  const Json& a = doc.at("alqg");
  c.alqg.phase.delta_d = get<double>(a, "delta_d", "alqg");
  c.alqg.phase.delta_v = get<double>(a, "delta_v", "alqg");
  c.alqg.phase.gap_surplus_axis = get<bool>(a, "gap_surplus_axis", "alqg");
  c.alqg.n_eval = get<int>(a, "n_eval", "alqg");
  c.alqg.retune_every = get<int>(a, "retune_every", "alqg");
  c.alqg.dead_zone_u = get<double>(a, "dead_zone_u", "alqg");
  c.alqg.descent.golden_tolerance = get<double>(a, "golden_tolerance", "alqg");
  c.alqg.descent.tolerance = get<double>(a, "tolerance", "alqg");
  c.alqg.descent.max_sweeps = get<int>(a, "max_sweeps", "alqg");
  const Json& bt = a.at("bounds");
  for (std::size_t i = 0; i < 9; ++i) {
    const std::string id = std::to_string(i + 1);
    const std::string where = "alqg.bounds." + id;
    if (!bt.contains(id)) throw ConfigError("missing bounds for region " + id);
    const Json& b = bt.at(id);
    auto iv = [&](const char* k) {
      const auto pr = get_pair(b, k, where);
      return Interval{pr[0], pr[1]};
    };
    c.alqg.table[i] = {iv("rho1"), iv("rho2"), iv("rho3"), iv("r"), get<double>(b, "floor", where)};
  }

  const Json& m = doc.at("mpc");
  c.mpc.horizon = get<int>(m, "horizon", "mpc");
  c.mpc.weights = get_weights(m.at("weights"), "mpc.weights");
  c.mpc.u_bound = get<double>(m, "u_bound", "mpc");
  c.mpc.max_iters = get<int>(m, "max_iters", "mpc");
  c.mpc.step_size = get<double>(m, "step_size", "mpc");
  c.mpc.kkt_tol = get<double>(m, "kkt_tol", "mpc");

  const Json& q = doc.at("qpolicy");
  c.qpolicy.learning.iterations = get<int>(q, "iterations", "qpolicy");
  c.qpolicy.learning.buffer_size = get<std::size_t>(q, "buffer", "qpolicy");
  c.qpolicy.learning.convergence = get<double>(q, "convergence", "qpolicy");
  c.qpolicy.learning.ridge.lambda = get<double>(q, "lambda", "qpolicy");
  c.qpolicy.learning.ridge.standardize = get<bool>(q, "standardize", "qpolicy");
  c.qpolicy.exploration.dither = get<double>(q, "dither", "qpolicy");
  c.qpolicy.exploration.episode_length = get<int>(q, "episode_length", "qpolicy");
  const auto box = get<std::vector<double>>(q, "initial_box", "qpolicy");
  if (box.size() != 3) throw ConfigError("qpolicy.initial_box needs 3 entries");
  c.qpolicy.exploration.initial_box = Vec3(box[0], box[1], box[2]);
  c.qpolicy.exploration.divergence_guard = get<double>(q, "divergence_guard", "qpolicy");
  c.qpolicy.exploration.seed = get<std::uint64_t>(q, "seed", "qpolicy");
  c.qpolicy.initial_gain_scale = get<double>(q, "initial_gain_scale", "qpolicy");

  const Json& act = doc.at("actuation");
  c.lower.prefilter_wn = get<double>(act, "prefilter_wn", "actuation");
  c.lower.prefilter_xi = get<double>(act, "prefilter_xi", "actuation");
  const Json& th = act.at("throttle");
  const std::string tp = "actuation.throttle";
  auto& f = c.lower.throttle;
  f.k_fe = get<double>(th, "k_fe", tp);
  f.k_fec = get<double>(th, "k_fec", tp);
  f.k_fp = get<double>(th, "k_fp", tp);
  f.k_fi = get<double>(th, "k_fi", tp);
  f.kd = get<double>(th, "kd", tp);
  f.kp_range = get_pair(th, "kp_range", tp);
  f.ki_range = get_pair(th, "ki_range", tp);
  f.e_sets = get_sets(th, "e_sets", tp);
  f.de_sets = get_sets(th, "de_sets", tp);
  const auto lv = get<std::vector<double>>(th, "out_levels", tp);
  if (lv.size() != 3) throw ConfigError("actuation.throttle.out_levels needs 3 entries");
  f.out_levels = {lv[0], lv[1], lv[2]};
  try {
    f.rule_p = parse_rule_table(get<std::vector<std::string>>(th, "rule_p", tp));
    f.rule_i = parse_rule_table(get<std::vector<std::string>>(th, "rule_i", tp));
  } catch (const InvalidParameter& ex) {
    throw ConfigError(std::string("actuation.throttle rule table: ") + ex.what());
  }
  const Json& br = act.at("brake");
  const std::string bp = "actuation.brake";
  c.lower.brake.Kp = get<double>(br, "kp", bp);
  c.lower.brake.Ti = get<double>(br, "ti", bp);
  c.lower.brake.Td = get<double>(br, "td", bp);
  c.lower.brake.u_min = get<double>(br, "u_min", bp);
  c.lower.brake.u_max = get<double>(br, "u_max", bp);
  c.lower.brake.rate_max = get<double>(br, "rate_max", bp);
  const Json& veh = act.at("vehicle");
  c.lower.vehicle.a_throttle_max = get<double>(veh, "a_throttle_max", "actuation.vehicle");
  c.lower.vehicle.a_brake_max = get<double>(veh, "a_brake_max", "actuation.vehicle");

  const Json& s = doc.at("supervisor");
  c.switching.h = get<double>(s, "h", "supervisor");
  c.switching.t_safety = get<double>(s, "t_safety", "supervisor");
  c.switching.v_margin = get<double>(s, "v_margin", "supervisor");
  c.switching.coast_curve.clear();
  for (const auto& pt : get<std::vector<std::vector<double>>>(s, "coast_curve", "supervisor")) {
    if (pt.size() != 2) throw ConfigError("supervisor.coast_curve entries must be [v, a]");
    c.switching.coast_curve.emplace_back(pt[0], pt[1]);
  }
  c.switching.ccs_kp = get<double>(s, "ccs_kp", "supervisor");
  c.switching.ccs_ki = get<double>(s, "ccs_ki", "supervisor");
  c.switching.hold_in_dead_zone = get<bool>(s, "hold_in_dead_zone", "supervisor");

  const Json& sim = doc.at("sim");
  c.u_limit = get<double>(sim, "u_limit", "sim");
  c.switching.a_limit = c.u_limit;
  c.blowup = get<double>(sim, "blowup", "sim");
  return c;
}

}  // namespace

Json to_json(const SimConfig& c)
{
  Json d;
  d["plant"] = {{"tau_h", c.plant.tau_h},
                {"d0", c.plant.d0},
                {"t_lag", c.plant.t_lag},
                {"k_gain", c.plant.k_gain},
                {"sample_time", c.plant.sample_time}};
  d["lqr"] = weights_json(c.lqr);
  d["estimator"] = {{"q_k", mat_json(c.kalman.Q_K)}, {"r_k", mat_json(c.kalman.R_K)}, {"h", mat_json(c.kalman.H)}};
  d["alqg"] = {{"delta_d", c.alqg.phase.delta_d},
               {"delta_v", c.alqg.phase.delta_v},
               {"gap_surplus_axis", c.alqg.phase.gap_surplus_axis},
               {"n_eval", c.alqg.n_eval},
               {"retune_every", c.alqg.retune_every},
               {"dead_zone_u", c.alqg.dead_zone_u},
               {"golden_tolerance", c.alqg.descent.golden_tolerance},
               {"tolerance", c.alqg.descent.tolerance},
               {"max_sweeps", c.alqg.descent.max_sweeps},
               {"bounds", bounds_json(c.alqg.table)}};
  d["mpc"] = {{"horizon", c.mpc.horizon},     {"weights", weights_json(c.mpc.weights)}, {"u_bound", c.mpc.u_bound},
              {"max_iters", c.mpc.max_iters}, {"step_size", c.mpc.step_size},           {"kkt_tol", c.mpc.kkt_tol}};
  const auto& ex = c.qpolicy.exploration;
  d["qpolicy"] = {{"iterations", c.qpolicy.learning.iterations},
                  {"buffer", c.qpolicy.learning.buffer_size},
                  {"convergence", c.qpolicy.learning.convergence},
                  {"lambda", c.qpolicy.learning.ridge.lambda},
                  {"standardize", c.qpolicy.learning.ridge.standardize},
                  {"dither", ex.dither},
                  {"episode_length", ex.episode_length},
                  {"initial_box", {ex.initial_box(0), ex.initial_box(1), ex.initial_box(2)}},
                  {"divergence_guard", ex.divergence_guard},
                  {"seed", ex.seed},
                  {"initial_gain_scale", c.qpolicy.initial_gain_scale}};
  const auto& f = c.lower.throttle;
  d["actuation"] = {
      {"prefilter_wn", c.lower.prefilter_wn},
      {"prefilter_xi", c.lower.prefilter_xi},
      {"throttle",
       {{"k_fe", f.k_fe},
        {"k_fec", f.k_fec},
        {"k_fp", f.k_fp},
        {"k_fi", f.k_fi},
        {"kd", f.kd},
        {"kp_range", f.kp_range},
        {"ki_range", f.ki_range},
        {"e_sets", sets_json(f.e_sets)},
        {"de_sets", sets_json(f.de_sets)},
        {"out_levels", f.out_levels},
        {"rule_p", format_rule_table(f.rule_p)},
        {"rule_i", format_rule_table(f.rule_i)}}},
      {"brake",
       {{"kp", c.lower.brake.Kp},
        {"ti", c.lower.brake.Ti},
        {"td", c.lower.brake.Td},
        {"u_min", c.lower.brake.u_min},
        {"u_max", c.lower.brake.u_max},
        {"rate_max", c.lower.brake.rate_max}}},
      {"vehicle", {{"a_throttle_max", c.lower.vehicle.a_throttle_max}, {"a_brake_max", c.lower.vehicle.a_brake_max}}}};
  Json curve = Json::array();
  for (const auto& [v, acc] : c.switching.coast_curve) curve.push_back({v, acc});
  d["supervisor"] = {{"h", c.switching.h},
                     {"t_safety", c.switching.t_safety},
                     {"v_margin", c.switching.v_margin},
                     {"coast_curve", curve},
                     {"ccs_kp", c.switching.ccs_kp},
                     {"ccs_ki", c.switching.ccs_ki},
                     {"hold_in_dead_zone", c.switching.hold_in_dead_zone}};
  d["sim"] = {{"u_limit", c.u_limit}, {"blowup", c.blowup}};
  return d;
}

Json to_json(const Scenario& s)
{
  const auto& p = s.profile;
  Json prof = {{"kind", std::string(to_string(p.kind))},
               {"v0", p.v0},
               {"amplitude", p.amplitude},
               {"period", p.period},
               {"t_event", p.t_event},
               {"decel", p.decel},
               {"hold", p.hold},
               {"accel", p.accel},
               {"cut_in_gap", p.cut_in_gap},
               {"t_lost", std::isinf(p.t_lost) ? Json(nullptr) : Json(p.t_lost)}};
  return {
      {"profile", prof},
      {"duration", s.duration},
      {"v_f0", s.v_f0},
      {"gap0", s.gap0},
      {"v_set", s.v_set},
      {"acc_only", s.acc_only},
      {"noise", {{"enabled", s.noise.enabled}, {"meas_std", s.noise.meas_std}, {"process_std", s.noise.process_std}}},
      {"seed", s.seed}};
}

Json to_json(const AppConfig& cfg)
{
  Json d = to_json(cfg.sim);
  Json sc = Json::object();
  for (const auto& [name, s] : cfg.scenarios) sc[name] = to_json(s);
  d["scenarios"] = sc;
  return d;
}

Json default_config_json()
{
  Json d = to_json(SimConfig{});
  d["scenarios"] = Json::object();
  return d;
}

Scenario scenario_from_json(const Json& doc, const Scenario& base)
{
  Json merged = to_json(base);
  merge_strict(merged, doc, "scenario");
  Scenario s = base;
  const Json& p = merged.at("profile");
  try {
    s.profile.kind = parse_profile_kind(get<std::string>(p, "kind", "profile"));
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  s.profile.v0 = get<double>(p, "v0", "profile");
  s.profile.amplitude = get<double>(p, "amplitude", "profile");
  s.profile.period = get<double>(p, "period", "profile");
  s.profile.t_event = get<double>(p, "t_event", "profile");
  s.profile.decel = get<double>(p, "decel", "profile");
  s.profile.hold = get<double>(p, "hold", "profile");
  s.profile.accel = get<double>(p, "accel", "profile");
  s.profile.cut_in_gap = get<double>(p, "cut_in_gap", "profile");
  s.profile.t_lost = get_or_inf(p, "t_lost", "profile");
  s.duration = get<double>(merged, "duration", "scenario");
  s.v_f0 = get<double>(merged, "v_f0", "scenario");
  s.gap0 = get<double>(merged, "gap0", "scenario");
  s.v_set = get<double>(merged, "v_set", "scenario");
  s.acc_only = get<bool>(merged, "acc_only", "scenario");
  const Json& n = merged.at("noise");
  s.noise.enabled = get<bool>(n, "enabled", "noise");
  const auto ms = get<std::vector<double>>(n, "meas_std", "noise");
  if (ms.size() != 3) throw ConfigError("noise.meas_std needs 3 entries");
  s.noise.meas_std = {ms[0], ms[1], ms[2]};
  s.noise.process_std = get<double>(n, "process_std", "noise");
  s.seed = get<std::uint64_t>(merged, "seed", "scenario");
  try {
    s.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("scenario '" + s.name + "': " + e.what());
  }
  return s;
}

AppConfig config_from_json(const Json& doc)
{
  Json merged = default_config_json();
  Json body = doc;
  Json scen = Json::object();
  if (body.is_object() && body.contains("scenarios")) {
    scen = body["scenarios"];
    body.erase("scenarios");
  }
  merge_strict(merged, body, "");
  AppConfig out;
  out.sim = parse_sim(merged);
  try {
    out.sim.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (!scen.is_object()) throw ConfigError("'scenarios' must be an object");
  for (const auto& [name, spec] : scen.items()) {
    if (!spec.is_object()) throw ConfigError("scenario '" + name + "' must be an object");
    Json fields = spec;
    Scenario base;
    if (fields.contains("base")) {
      try {
        base = find_scenario(fields.at("base").get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError("scenario '" + name + "': " + e.what());
      }
      fields.erase("base");
    }
    base.name = name;
    out.scenarios[name] = scenario_from_json(fields, base);
  }
  return out;
}

Json read_config_file(const std::filesystem::path& path)
{
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  try {
    return Json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
}

void apply_override(Json& doc, std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like key.path=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t start = 0;
  bool free_form = false;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override path '" + path + "' has an empty component");
    if (free_form && node->is_null()) *node = Json::object();
    if (!node->is_object()) throw ConfigError("override path '" + path + "' runs through a non-object");
    if (node == &doc && key == "scenarios") free_form = true;
    if (!free_form && !node->contains(key)) throw ConfigError("unknown config key '" + path + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
}

AppConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
  Json user = path.empty() ? Json::object() : read_config_file(path);
  if (!user.is_object()) throw ConfigError("config root must be an object");
  Json doc = default_config_json();
  // layer the file first so overrides see its keys
  {
    Json body = user;
    Json scen = body.contains("scenarios") ? body["scenarios"] : Json::object();
    body.erase("scenarios");
    merge_strict(doc, body, "");
    doc["scenarios"] = scen;
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

Scenario resolve_scenario(const AppConfig& cfg, std::string_view name)
{
  if (auto it = cfg.scenarios.find(std::string(name)); it != cfg.scenarios.end()) return it->second;
  try {
    return find_scenario(name);
  } catch (const InvalidParameter& e) {
    std::string msg = e.what();
    if (!cfg.scenarios.empty()) {
      msg += " (config also defines:";
      for (const auto& [n, s] : cfg.scenarios) msg += " " + n;
      msg += ")";
    }
    throw ConfigError(msg);
  }
}

}  // namespace acclab

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

#include "acclab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "acclab/config.hpp"
#include "acclab/errors.hpp"
#include "acclab/numfmt.hpp"
#include "acclab/qpolicy.hpp"
#include "acclab/riccati.hpp"
#include "acclab/simulator.hpp"

namespace acclab {

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string noise;
};

void add_common(CLI::App* sub, CommonArgs& a, bool with_seed = true)
{
  sub->add_option("--config", a.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--set", a.sets, "override a config key, e.g. --set plant.tau_h=1.2");
  sub->add_option("--out", a.out, "output directory")->capture_default_str();
  if (with_seed) sub->add_option("--seed", a.seed, "scenario seed");
  sub->add_option("--noise", a.noise, "measurement noise on|off")->check(CLI::IsMember({"on", "off"}));
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s)
{
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) {
    try {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
        continue;
      }
      const auto lo = std::stoull(item.substr(0, dash));
      const auto hi = std::stoull(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("seed range '" + item + "' is reversed");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed '" + item + "'");
    }
  }
  return out;
}

Scenario prepare_scenario(const AppConfig& cfg, const std::string& name, const CommonArgs& a)
{
  Scenario sc = resolve_scenario(cfg, name);
  if (a.seed) sc.seed = *a.seed;
  if (!a.noise.empty()) sc.noise.enabled = a.noise == "on";
  return sc;
}

fs::path make_out_dir(const std::string& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

std::ofstream open_out(const fs::path& p)
{
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

Json number(double v)
{
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json metrics_json(const Metrics& m, const RunDiagnostics& d, bool timing)
{
  Json j = {{"max_abs_d_error", number(m.max_abs_d_error)},
            {"mean_abs_d_error", number(m.mean_abs_d_error)},
            {"rms_v_rel", number(m.rms_v_rel)},
            {"max_abs_a_f_g", number(m.max_abs_a_f_g)},
            {"max_abs_jerk", number(m.max_abs_jerk)},
            {"control_switches", m.control_switches},
            {"actuator_switches", m.actuator_switches},
            {"steps", m.steps},
            {"min_gap", number(d.min_gap)},
            {"collision", d.collision},
            {"max_abs_u", number(d.max_abs_u)},
            {"alqg_retunes", d.alqg_retunes},
            {"alqg_fallbacks", d.alqg_fallbacks},
            {"mpc_unconverged", d.mpc_unconverged}};
  if (timing) j["mean_compute_us"] = m.mean_compute_us;
  return j;
}

Json stamp(const std::string& sub, const AppConfig& cfg, const Json& extra)
{
  Json j = {{"tool", "acclab"}, {"subcommand", sub}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  j["config"] = to_json(cfg.sim);
  return j;
}

void write_json(const fs::path& p, const Json& j)
{
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

struct RunOutput {
  SimLog log;
  Metrics metrics;
  RunDiagnostics diag;
};

RunOutput run_one(const Scenario& sc, ControllerKind kind, const SimConfig& cfg)
{
  RunOutput r;
  r.log = run(sc, kind, cfg, &r.diag);
  r.metrics = compute_metrics(r.log);
  return r;
}

std::string fixed(double v, int prec)
{
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

void write_table(std::ostream& os, const std::vector<std::pair<std::string, RunOutput>>& rows)
{
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %10s %10s %9s %9s %10s %6s %6s %9s\n", "ctrl", "max|d_e|", "mean|d_e|",
                "rms_vrel", "max|a|g", "max_jerk", "ctl_sw", "act_sw", "min_gap");
  os << line;
  for (const auto& [name, r] : rows) {
    const auto& m = r.metrics;
    std::snprintf(line, sizeof line, "%-8s %10s %10s %9s %9s %10s %6d %6d %9s\n", name.c_str(),
                  fixed(m.max_abs_d_error, 3).c_str(), fixed(m.mean_abs_d_error, 3).c_str(),
                  fixed(m.rms_v_rel, 3).c_str(), fixed(m.max_abs_a_f_g, 4).c_str(), fixed(m.max_abs_jerk, 2).c_str(),
                  m.control_switches, m.actuator_switches, fixed(r.diag.min_gap, 2).c_str());
    os << line;
  }
}

void write_timing(const fs::path& p, const std::vector<std::pair<std::string, RunOutput>>& rows)
{
  auto os = open_out(p);
  for (const auto& [name, r] : rows) {
    os << name << " mean_compute_us " << fixed(r.metrics.mean_compute_us, 3) << " samples " << r.log.compute_us.size()
       << '\n';
  }
}

int cmd_simulate(const CommonArgs& a, const std::string& scenario, const std::string& controller, bool timing,
                 std::ostream& out)
{
  const AppConfig cfg = load_config(a.config, a.sets);
  const Scenario sc = prepare_scenario(cfg, scenario, a);
  const ControllerKind kind = parse_controller(controller);
  const fs::path dir = make_out_dir(a.out);
  const RunOutput r = run_one(sc, kind, cfg.sim);

  const std::string ctl(to_string(kind));
  export_csv(r.log, dir / (ctl + ".csv"));
  {
    auto os = open_out(dir / "metrics.txt");
    os << "scenario " << sc.name << "\ncontroller " << ctl << "\nseed " << sc.seed << '\n';
    write_metrics_text(os, r.metrics);
  }
  write_json(dir / "metrics.json", metrics_json(r.metrics, r.diag, false));
  write_json(dir / "run.json",
             stamp("simulate", cfg,
                   {{"scenario", to_json(sc)}, {"scenario_name", sc.name}, {"controller", ctl}, {"seed", sc.seed}}));
  std::vector<std::pair<std::string, RunOutput>> rows{{ctl, r}};
  if (timing) write_timing(dir / "timing.txt", rows);
  write_table(out, rows);
  return kExitOk;
}

int cmd_compare(const CommonArgs& a, const std::string& scenario, const std::string& controllers, bool timing,
                std::ostream& out)
{
  const auto names = split_list(controllers);
  if (names.size() < 2) throw InvalidParameter("compare needs at least two controllers");
  std::vector<ControllerKind> kinds;
  for (const auto& n : names) {
    const auto k = parse_controller(n);
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
      throw InvalidParameter("controller '" + n + "' listed twice");
    }
    kinds.push_back(k);
  }
  const AppConfig cfg = load_config(a.config, a.sets);
  const Scenario sc = prepare_scenario(cfg, scenario, a);
  const fs::path dir = make_out_dir(a.out);

  std::vector<std::pair<std::string, RunOutput>> rows;
  Json mj = Json::object();
  for (auto k : kinds) {
    const std::string ctl(to_string(k));
    rows.emplace_back(ctl, run_one(sc, k, cfg.sim));
    export_csv(rows.back().second.log, dir / (ctl + ".csv"));
    mj[ctl] = metrics_json(rows.back().second.metrics, rows.back().second.diag, false);
  }
  {
    auto os = open_out(dir / "compare.txt");
    os << "scenario " << sc.name << " seed " << sc.seed << " noise " << (sc.noise.enabled ? "on" : "off") << '\n';
    write_table(os, rows);
  }
  write_json(dir / "metrics.json", mj);
  Json ctl_list = Json::array();
  for (const auto& [n, r] : rows) ctl_list.push_back(n);
  write_json(
      dir / "run.json",
      stamp("compare", cfg,
            {{"scenario", to_json(sc)}, {"scenario_name", sc.name}, {"controllers", ctl_list}, {"seed", sc.seed}}));
  if (timing) write_timing(dir / "timing.txt", rows);
  write_table(out, rows);
  return kExitOk;
}

struct LearnArgs {
  std::optional<int> iters;
  std::optional<double> lambda;
  std::optional<std::size_t> buffer;
};

int cmd_learn(const CommonArgs& a, const LearnArgs& l, std::ostream& out)
{
  AppConfig cfg = load_config(a.config, a.sets);
  auto& q = cfg.sim.qpolicy;
  if (l.iters) q.learning.iterations = *l.iters;
  if (l.lambda) q.learning.ridge.lambda = *l.lambda;
  if (l.buffer) q.learning.buffer_size = *l.buffer;
  if (a.seed) q.exploration.seed = *a.seed;
  const fs::path dir = make_out_dir(a.out);

  const DiscreteSS dss = discretize(cfg.sim.plant);
  const Row3 k_opt = -lqr_gain(dss, cfg.sim.lqr).K;  // u = K x convention
  const Row3 k0 = q.initial_gain_scale * k_opt;
  SampleGenerator gen(dss, cfg.sim.lqr, q.exploration);
  const PolicyIterationResult res = policy_iteration(gen, k0, q.learning);

  {
    auto os = open_out(dir / "gains.csv");
    os << "iteration,k1,k2,k3,err_inf\n";
    for (std::size_t i = 0; i < res.gains.size(); ++i) {
      const Row3& k = res.gains[i];
      os << i << ',' << format_double(k(0)) << ',' << format_double(k(1)) << ',' << format_double(k(2)) << ','
         << format_double((k - k_opt).lpNorm<Eigen::Infinity>()) << '\n';
    }
  }
  const bool learned = res.gains.size() > 1;
  if (learned) {
    auto os = open_out(dir / "omega.txt");
    write_qweights(os, res.last_weights);
  }
  const Row3& k_final = res.gains.back();
  const double gap = (k_final - k_opt).lpNorm<Eigen::Infinity>();
  std::ostringstream rep;
  rep << "iterations " << (res.gains.size() - 1) << '\n'
      << "converged " << (res.converged ? "yes" : "no") << '\n'
      << "k_initial " << format_double(k0(0)) << ' ' << format_double(k0(1)) << ' ' << format_double(k0(2)) << '\n'
      << "k_final " << format_double(k_final(0)) << ' ' << format_double(k_final(1)) << ' ' << format_double(k_final(2))
      << '\n'
      << "k_dare " << format_double(k_opt(0)) << ' ' << format_double(k_opt(1)) << ' ' << format_double(k_opt(2))
      << '\n'
      << "err_inf " << format_double(gap) << '\n';
  {
    auto os = open_out(dir / "learn.txt");
    os << rep.str();
  }
  write_json(dir / "run.json", stamp("learn", cfg, {{"seed", q.exploration.seed}}));
  out << rep.str();
  return kExitOk;
}

struct SweepJob {
  std::string scenario;
  ControllerKind kind;
  std::uint64_t seed;
};

struct SweepResult {
  bool ok = false;
  int code = kExitOk;
  std::string error;
  Metrics metrics;
  RunDiagnostics diag;
};

int cmd_sweep(const CommonArgs& a, const std::string& scenarios, const std::string& controllers,
              const std::string& seeds_text, unsigned jobs, std::ostream& out, std::ostream& err)
{
  const auto seeds = parse_seeds(seeds_text);
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  const auto scen_names = split_list(scenarios);
  if (scen_names.empty()) throw ConfigError("sweep needs at least one scenario");
  const auto ctl_names = split_list(controllers);
  if (ctl_names.empty()) throw ConfigError("sweep needs at least one controller");
  std::vector<ControllerKind> kinds;
  for (const auto& n : ctl_names) kinds.push_back(parse_controller(n));

  const AppConfig cfg = load_config(a.config, a.sets);
  std::vector<Scenario> base;
  for (const auto& n : scen_names) base.push_back(prepare_scenario(cfg, n, a));
  const fs::path dir = make_out_dir(a.out);

  std::vector<SweepJob> work;
  for (const auto& sc : base) {
    for (auto k : kinds) {
      for (auto s : seeds) work.push_back({sc.name, k, s});
    }
  }
  std::vector<SweepResult> results(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      const auto& job = work[i];
      Scenario sc = *std::find_if(base.begin(), base.end(), [&](const Scenario& s) { return s.name == job.scenario; });
      sc.seed = job.seed;
      SweepResult& r = results[i];
      try {
        SimLog log = run(sc, job.kind, cfg.sim, &r.diag);
        r.metrics = compute_metrics(log);
        r.ok = true;
      } catch (const NumericError& e) {
        r.code = kExitNumeric;
        r.error = e.what();
      } catch (const std::exception& e) {
        r.code = kExitUsage;
        r.error = e.what();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, work.size()));
  std::vector<std::future<void>> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  int code = kExitOk;
  std::size_t failed = 0;
  {
    auto os = open_out(dir / "sweep.csv");
    os << "scenario,controller,seed,status,max_abs_d_error,mean_abs_d_error,rms_v_rel,max_abs_a_f_g,max_abs_jerk,"
          "control_switches,actuator_switches,min_gap,collision\n";
    for (std::size_t i = 0; i < work.size(); ++i) {
      const auto& job = work[i];
      const auto& r = results[i];
      os << job.scenario << ',' << to_string(job.kind) << ',' << job.seed << ',';
      if (!r.ok) {
        os << "error,,,,,,,,,\n";
        err << "run " << job.scenario << '/' << to_string(job.kind) << '/' << job.seed << " failed: " << r.error
            << '\n';
        code = std::max(code, r.code);
        ++failed;
        continue;
      }
      const auto& m = r.metrics;
      os << "ok," << format_double(m.max_abs_d_error) << ',' << format_double(m.mean_abs_d_error) << ','
         << format_double(m.rms_v_rel) << ',' << format_double(m.max_abs_a_f_g) << ',' << format_double(m.max_abs_jerk)
         << ',' << m.control_switches << ',' << m.actuator_switches << ',' << format_double(r.diag.min_gap) << ','
         << (r.diag.collision ? 1 : 0) << '\n';
    }
  }
  Json seed_list = Json::array();
  for (auto s : seeds) seed_list.push_back(s);
  Json scen_list = Json::object();
  for (const auto& sc : base) scen_list[sc.name] = to_json(sc);
  write_json(
      dir / "run.json",
      stamp("sweep", cfg, {{"scenarios", scen_list}, {"controllers", split_list(controllers)}, {"seeds", seed_list}}));
  out << "sweep: " << work.size() << " runs, " << failed << " failed\n";
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"acclab: adaptive cruise control laboratory", "acclab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommonArgs common;
  std::string scenario = "sinusoid";
  std::string controller;
  std::string controllers;
  std::string seeds;
  std::string scenarios = "sinusoid";
  unsigned jobs = 0;
  bool timing = false;
  LearnArgs learn;

  auto* sim = app.add_subcommand("simulate", "run one scenario with one controller");
  add_common(sim, common);
  sim->add_option("--scenario", scenario, "scenario name")->capture_default_str();
  sim->add_option("--controller", controller, "lqr, lqg, alqg, qpolicy or mpc")->required();
  sim->add_flag("--timing", timing, "also write timing.txt (not reproducible)");

  auto* cmp = app.add_subcommand("compare", "run several controllers on one scenario");
  add_common(cmp, common);
  cmp->add_option("--scenario", scenario, "scenario name")->capture_default_str();
  cmp->add_option("--controllers", controllers, "comma separated list")->required();
  cmp->add_flag("--timing", timing, "also write timing.txt (not reproducible)");

  auto* lrn = app.add_subcommand("learn", "learn a Q-function policy on the noise-free plant");
  add_common(lrn, common);
  lrn->add_option("--iters", learn.iters, "policy iterations");
  lrn->add_option("--lambda", learn.lambda, "ridge penalty");
  lrn->add_option("--buffer", learn.buffer, "samples per iteration");

  auto* swp = app.add_subcommand("sweep", "batch runs over scenarios, controllers and seeds");
  add_common(swp, common, false);
  swp->add_option("--scenarios,--scenario", scenarios, "comma separated list")->capture_default_str();
  swp->add_option("--controllers,--controller", controllers, "comma separated list")->required();
  swp->add_option("--seeds", seeds, "e.g. 1,2,5-9")->required();
  swp->add_option("--jobs", jobs, "worker threads (0 = hardware)");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common, scenario, controller, timing, out);
    if (cmp->parsed()) return cmd_compare(common, scenario, controllers, timing, out);
    if (lrn->parsed()) return cmd_learn(common, learn, out);
    if (swp->parsed()) return cmd_sweep(common, scenarios, controllers, seeds, jobs, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric abort: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace acclab

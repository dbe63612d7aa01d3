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

#include "acclab/alqg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "acclab/errors.hpp"

namespace acclab {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

using Point = std::array<double, 4>;

double point_sum(const Point& p)
{
  return p[0] + p[1] + p[2] + p[3];
}

class CountingObjective {
 public:
  explicit CountingObjective(const WeightObjective& f) : f_(f) {}

  double operator()(const Point& p)
  {
    ++count_;
    const double v = f_(WeightSet::from_array(p));
    if (!std::isfinite(v)) throw NumericError("coordinate_descent: objective returned a non-finite value");
    return v;
  }
  [[nodiscard]] int count() const { return count_; }

 private:
  const WeightObjective& f_;
  int count_ = 0;
};

/// Minimises g(t) over [lo, hi] by golden-section search. Returns the best of
/// the final bracket and the two endpoints; the caller compares against the
/// current value.
template <typename G>
std::pair<double, double> golden_section(G&& g, double lo, double hi, double rel_tol)
{
  const double width0 = hi - lo;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = g(c);
  double fd = g(d);
  while ((b - a) > rel_tol * width0) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = g(d);
    }
  }
  std::pair<double, double> best = fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
  for (double t : {lo, hi}) {
    const double ft = g(t);
    if (ft < best.second) best = {t, ft};
  }
  return best;
}

}  // namespace

void PhaseConfig::validate() const
{
  if (!(delta_d > 0.0) || !(delta_v > 0.0)) {
    throw InvalidParameter("phase: delta_d and delta_v must be > 0");
  }
}

double plane_distance(const AccState& x, const PhaseConfig& cfg)
{
  return cfg.gap_surplus_axis ? -x.d_error : x.d_error;
}

PhaseRegion classify(double d_plane, double v_rel, const PhaseConfig& cfg)
{
  // Rows: far / near / close. Columns: closing / matched / opening.
  static constexpr int kIds[3][3] = {{1, 2, 3}, {9, 8, 7}, {6, 5, 4}};
  const int row = d_plane > cfg.delta_d ? 0 : (d_plane < -cfg.delta_d ? 2 : 1);
  const int col = v_rel < -cfg.delta_v ? 0 : (v_rel > cfg.delta_v ? 2 : 1);
  return PhaseRegion{kIds[row][col]};
}

void RegionBounds::validate() const
{
  const Point lo = lower();
  const Point hi = upper();
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw InvalidParameter("region bounds: each lower bound must be below its upper bound");
    }
    if (lo[i] < 0.0) throw InvalidParameter("region bounds: weights must be non-negative");
  }
  if (!(r.lo > 0.0)) throw InvalidParameter("region bounds: lower bound on r must be > 0");
  if (!(floor > point_sum(lo)) || !(floor < point_sum(hi))) {
    throw InvalidParameter("region bounds: floor must lie strictly between the lower and upper sums");
  }
}

bool RegionBounds::contains(const WeightSet& w, double slack) const
{
  const Point p = w.as_array();
  const Point lo = lower();
  const Point hi = upper();
  const double tol = slack * std::max(1.0, floor);
  for (std::size_t i = 0; i < 4; ++i) {
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  }
  return point_sum(p) >= floor - tol;
}

const BoundsTable& default_bounds_table()
{
  // Orderings: far rows (1-3) and close-opening/matched (4, 5) cap rho1/rho2
  // low; the steady region 8 and near-opening 7 carry a high rho3 floor; the
  // near-closing region 9 caps rho3 low and region 6 caps it lowest.
  static const BoundsTable table = [] {
    BoundsTable t{};
    const RegionBounds gentle{{0.5, 2.0}, {0.5, 2.0}, {0.5, 3.0}, {0.5, 2.0}, 4.0};
    t[0] = gentle;                                                  // 1
    t[1] = gentle;                                                  // 2
    t[2] = gentle;                                                  // 3
    t[3] = gentle;                                                  // 4
    t[4] = gentle;                                                  // 5
    t[5] = {{1.0, 8.0}, {1.0, 8.0}, {0.05, 0.3}, {0.5, 2.0}, 8.0};  // 6
    t[6] = {{0.5, 2.0}, {0.5, 2.0}, {2.0, 6.0}, {0.5, 2.0}, 6.0};   // 7
    t[7] = {{1.0, 4.0}, {1.0, 4.0}, {2.0, 6.0}, {0.5, 2.0}, 8.0};   // 8
    t[8] = {{1.0, 4.0}, {1.0, 4.0}, {0.2, 0.8}, {0.5, 2.0}, 6.0};   // 9
    return t;
  }();
  return table;
}

const RegionBounds& region_bounds(PhaseRegion region, const BoundsTable& table)
{
  if (region.id < 1 || region.id > 9) {
    throw InvalidParameter("region_bounds: region id " + std::to_string(region.id) + " out of range");
  }
  const RegionBounds& b = table[static_cast<std::size_t>(region.id - 1)];
  b.validate();
  return b;
}

WeightSet project_feasible(const WeightSet& w, const RegionBounds& bounds)
{
  const Point lo = bounds.lower();
  const Point hi = bounds.upper();
  Point p = w.as_array();
  for (std::size_t i = 0; i < 4; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
  const double deficit = bounds.floor - point_sum(p);
  if (deficit > 0.0) {
    double room = 0.0;
    for (std::size_t i = 0; i < 4; ++i) room += hi[i] - p[i];
    const double theta = std::min(1.0, deficit / room);
    for (std::size_t i = 0; i < 4; ++i) p[i] += theta * (hi[i] - p[i]);
  }
  return WeightSet::from_array(p);
}

DescentResult coordinate_descent(const WeightObjective& objective, const RegionBounds& bounds, const WeightSet& init,
                                 const DescentOptions& opts)
{
  bounds.validate();
  if (!bounds.contains(init, 1e-12)) throw InvalidParameter("coordinate_descent: infeasible initial point");
  if (!(opts.golden_tolerance > 0.0 && opts.golden_tolerance < 1.0) || opts.max_sweeps < 1) {
    throw InvalidParameter("coordinate_descent: invalid options");
  }

  CountingObjective f(objective);
  const Point lo = bounds.lower();
  const Point hi = bounds.upper();
  const double floor_tol = 1e-12 * std::max(1.0, bounds.floor);

  Point x = init.as_array();
  double fx = f(x);

  DescentResult result;
  result.history.push_back(fx);

  auto line_search = [&](auto&& make_point, double t_lo, double t_hi) {
    if (!(t_hi - t_lo > 1e-15 * std::max(1.0, std::abs(t_hi)))) return;
    auto g = [&](double t) { return f(make_point(t)); };
    const auto [t_best, f_best] = golden_section(g, t_lo, t_hi, opts.golden_tolerance);
    if (f_best < fx) {
      x = make_point(t_best);
      fx = f_best;
    }
  };

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double f_start = fx;

    for (std::size_t i = 0; i < 4; ++i) {
      const double others = point_sum(x) - x[i];
      const double t_lo = std::max(lo[i], bounds.floor - others);
      const double t_hi = hi[i];
      const Point base = x;
      line_search(
          [&, base, i](double t) {
            Point p = base;
            p[i] = t;
            return p;
          },
          t_lo, t_hi);
    }

    if (point_sum(x) <= bounds.floor + floor_tol) {
      // Travel along the floor plane: w_i += t, w_j -= t keeps the sum fixed.
      for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t j = (i + 1) % 4;
        const Point base = x;
        const double t_lo = std::max(lo[i] - base[i], base[j] - hi[j]);
        const double t_hi = std::min(hi[i] - base[i], base[j] - lo[j]);
        line_search(
            [&, base, i, j](double t) {
              Point p = base;
              p[i] = std::clamp(base[i] + t, lo[i], hi[i]);
              p[j] = std::clamp(base[j] - t, lo[j], hi[j]);
              return p;
            },
            t_lo, t_hi);
      }
    }

    result.sweeps = sweep + 1;
    result.history.push_back(fx);
    if (fx > f_start) throw NumericError("coordinate_descent: objective increased during a sweep");
    if (f_start - fx <= opts.tolerance * std::max(std::abs(f_start), std::numeric_limits<double>::min())) {
      break;
    }
  }

  result.weights = WeightSet::from_array(x);
  result.J = fx;
  result.evaluations = f.count();
  return result;
}

void AlqgConfig::validate() const
{
  phase.validate();
  for (const RegionBounds& b : table) b.validate();
  if (n_eval < 1) throw InvalidParameter("alqg: n_eval must be >= 1");
  if (retune_every < 1) throw InvalidParameter("alqg: retune_every must be >= 1");
  if (!(dead_zone_u >= 0.0)) throw InvalidParameter("alqg: dead_zone_u must be >= 0");
}

double closed_loop_cost(const AccState& x0, const WeightSet& w, const Row3& K, const DiscreteSS& dss, int n, double a_p)
{
  // Closed-loop map folded once: x+ = (G - HK) x + L a_p.
  const Mat3 closed = dss.G - dss.H * K;
  const Vec3 drive = dss.L * a_p;
  Vec3 x = x0.vector();
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = -K.dot(x.transpose());
    sum += stage_cost(x, u, w);
    x = closed * x + drive;
  }
  return sum / static_cast<double>(n);
}

std::size_t GainCache::KeyHash::operator()(const std::array<double, 4>& k) const
{
  std::size_t h = 0;
  for (double v : k) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    h ^= std::hash<std::uint64_t>{}(bits) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Row3 GainCache::gain(const DiscreteSS& dss, const WeightSet& w)
{
  const auto key = w.as_array();
  if (auto it = map_.find(key); it != map_.end()) {
    ++hits_;
    return it->second;
  }
  ++misses_;
  const Row3 K = lqr_gain(dss, w).K;
  if (map_.size() >= capacity_) map_.clear();
  map_.emplace(key, K);
  return K;
}

AlqgStep alqg_step(const AccState& x_hat, const WeightSet& prev, const DiscreteSS& dss, const AlqgConfig& cfg,
                   double a_p_hold, GainCache* cache)
{
  AlqgStep out;
  out.region = classify(plane_distance(x_hat, cfg.phase), x_hat.v_rel, cfg.phase);
  const RegionBounds& bounds = region_bounds(out.region, cfg.table);
  const WeightSet init = project_feasible(prev, bounds);

  auto gain_of = [&](const WeightSet& w) { return cache ? cache->gain(dss, w) : Row3(lqr_gain(dss, w).K); };
  const WeightObjective objective = [&](const WeightSet& w) {
    return closed_loop_cost(x_hat, w, gain_of(w), dss, cfg.n_eval, a_p_hold);
  };
  const DescentResult cd = coordinate_descent(objective, bounds, init, cfg.descent);

  out.tune.weights = cd.weights;
  out.tune.gain = gain_of(cd.weights);
  out.tune.J = cd.J;
  out.tune.sweeps = cd.sweeps;
  out.tune.evaluations = cd.evaluations;
  out.u = lqr_control(x_hat, out.tune.gain);
  return out;
}

AlqgController::AlqgController(DiscreteSS dss, AlqgConfig cfg, WeightSet initial)
    : dss_(std::move(dss)), cfg_(std::move(cfg)), initial_(initial), weights_(initial)
{
  cfg_.validate();
  initial_.validate();
  gain_ = lqr_gain(dss_, initial_).K;
}

double AlqgController::step(const AccState& x_hat, double a_p_hold)
{
  const PhaseRegion region = classify(plane_distance(x_hat, cfg_.phase), x_hat.v_rel, cfg_.phase);
  const bool retune = !tuned_ || region != region_ || since_tune_ >= cfg_.retune_every;
  region_ = region;
  if (retune) {
    try {
      const AlqgStep s = alqg_step(x_hat, weights_, dss_, cfg_, a_p_hold, &cache_);
      weights_ = s.tune.weights;
      gain_ = s.tune.gain;
    } catch (const NumericError&) {
      // Keep the previous weights and gain.
      ++fallbacks_;
    }
    tuned_ = true;
    since_tune_ = 0;
    ++retunes_;
  }
  ++since_tune_;

  double u = lqr_control(x_hat, gain_);
  const bool dead_zone_row = region_.id == 7 || region_.id == 8 || region_.id == 9;
  if (dead_zone_row && std::abs(u) < cfg_.dead_zone_u) u = 0.0;
  return u;
}

void AlqgController::reset()
{
  weights_ = initial_;
  gain_ = lqr_gain(dss_, initial_).K;
  region_ = PhaseRegion{};
  tuned_ = false;
  since_tune_ = 0;
  retunes_ = 0;
  fallbacks_ = 0;
}

}  // namespace acclab

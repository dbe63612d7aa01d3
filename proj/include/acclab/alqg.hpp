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
#include <functional>
#include <unordered_map>
#include <vector>

#include "acclab/plant.hpp"
#include "acclab/riccati.hpp"

namespace acclab {

/// Operating region of the (distance, relative velocity) phase plane, 1..9.
///
///                 closing   matched   opening
///   far   (+)        1         2         3
///   near  (0)        9         8         7
///   close (-)        6         5         4
struct PhaseRegion {
  int id = 8;
  friend bool operator==(const PhaseRegion&, const PhaseRegion&) = default;
};

struct PhaseConfig {
  double delta_d = 1.0;  ///< dead-zone half-width on the distance axis [m]
  double delta_v = 0.5;  ///< near-zero half-width on the velocity axis [m/s]
  /// When true the distance axis is d - d_desire (positive means farther than
  /// desired), i.e. the negated regulation error.
  bool gap_surplus_axis = true;

  void validate() const;
};

/// Distance coordinate of the phase plane for a regulation state.
[[nodiscard]] double plane_distance(const AccState& x, const PhaseConfig& cfg);

[[nodiscard]] PhaseRegion classify(double d_plane, double v_rel, const PhaseConfig& cfg);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Box on (rho1, rho2, rho3, r) plus the floor rho1 + rho2 + rho3 + r >= floor.
struct RegionBounds {
  Interval rho1;
  Interval rho2;
  Interval rho3;
  Interval r;
  double floor = 0.0;

  [[nodiscard]] std::array<double, 4> lower() const { return {rho1.lo, rho2.lo, rho3.lo, r.lo}; }
  [[nodiscard]] std::array<double, 4> upper() const { return {rho1.hi, rho2.hi, rho3.hi, r.hi}; }
  /// Each lower < upper, r.lo > 0, and sum(lower) < floor < sum(upper).
  void validate() const;
  [[nodiscard]] bool contains(const WeightSet& w, double slack = 1e-12) const;
};

using BoundsTable = std::array<RegionBounds, 9>;

[[nodiscard]] const BoundsTable& default_bounds_table();

/// Bounds for a region; throws InvalidParameter on an invalid id or entry.
[[nodiscard]] const RegionBounds& region_bounds(PhaseRegion region, const BoundsTable& table);

struct DescentOptions {
  double golden_tolerance = 1e-3;  ///< final bracket width relative to the initial interval
  double tolerance = 1e-4;         ///< relative sweep-to-sweep improvement to stop
  int max_sweeps = 8;
};

struct DescentResult {
  WeightSet weights;
  double J = 0.0;
  int sweeps = 0;
  int evaluations = 0;
  std::vector<double> history;  ///< objective after each sweep, history[0] = f(init)
};

using WeightObjective = std::function<double(const WeightSet&)>;

/// Cyclic coordinate descent over rho1 -> rho2 -> rho3 -> r with golden-section
/// line searches. Each coordinate interval is clipped so the floor stays
/// satisfied; while the floor is active, exchange moves along e_i - e_{i+1}
/// let the iterate travel on the floor plane.
[[nodiscard]] DescentResult coordinate_descent(const WeightObjective& objective, const RegionBounds& bounds,
                                               const WeightSet& init, const DescentOptions& opts = {});

/// Moves w into the box and, if needed, toward the upper corner until the floor holds.
[[nodiscard]] WeightSet project_feasible(const WeightSet& w, const RegionBounds& bounds);

struct AlqgConfig {
  PhaseConfig phase;
  BoundsTable table = default_bounds_table();
  int n_eval = 60;                       ///< closed-loop evaluation horizon [steps]
  int retune_every = 10;                 ///< retune cadence inside one region [steps]
  double dead_zone_u = 0.02 * kGravity;  ///< output suppression threshold in regions 7/8/9
  DescentOptions descent;

  void validate() const;
};

struct TuneResult {
  WeightSet weights;
  Row3 gain = Row3::Zero();
  double J = 0.0;
  int sweeps = 0;
  int evaluations = 0;
};

/// Mean closed-loop cost of u = -K(w) x from x0 over n steps with the
/// preceding-vehicle acceleration held at a_p.
[[nodiscard]] double closed_loop_cost(const AccState& x0, const WeightSet& w, const Row3& K, const DiscreteSS& dss,
                                      int n, double a_p);

/// Memo of lqr_gain keyed on exact weight values, for one fixed plant.
/// Golden-section probes from the same warm start repeat exactly, so
/// successive retunes inside a region mostly hit.
class GainCache {
 public:
  explicit GainCache(std::size_t capacity = 4096) : capacity_(capacity) {}

  Row3 gain(const DiscreteSS& dss, const WeightSet& w);
  void clear() { map_.clear(); }
  [[nodiscard]] std::size_t hits() const { return hits_; }
  [[nodiscard]] std::size_t misses() const { return misses_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::array<double, 4>& k) const;
  };
  std::size_t capacity_;
  std::unordered_map<std::array<double, 4>, Row3, KeyHash> map_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct AlqgStep {
  double u = 0.0;
  PhaseRegion region;
  TuneResult tune;
};

/// One full tuning step: classify, fetch bounds, run coordinate descent on the
/// closed-loop cost warm-started from prev, and return u = -K' x_hat.
[[nodiscard]] AlqgStep alqg_step(const AccState& x_hat, const WeightSet& prev, const DiscreteSS& dss,
                                 const AlqgConfig& cfg, double a_p_hold, GainCache* cache = nullptr);

/// Online controller: retunes on region change or every retune_every samples,
/// suppresses small outputs in the dead-zone rows, and falls back to the
/// previous weights if a tuned gain fails the stability check.
class AlqgController {
 public:
  AlqgController(DiscreteSS dss, AlqgConfig cfg, WeightSet initial);

  double step(const AccState& x_hat, double a_p_hold);
  void reset();

  [[nodiscard]] const WeightSet& weights() const { return weights_; }
  [[nodiscard]] const Row3& gain() const { return gain_; }
  [[nodiscard]] PhaseRegion region() const { return region_; }
  [[nodiscard]] int retunes() const { return retunes_; }
  [[nodiscard]] int fallbacks() const { return fallbacks_; }

 private:
  DiscreteSS dss_;
  AlqgConfig cfg_;
  WeightSet initial_;
  WeightSet weights_;
  Row3 gain_ = Row3::Zero();
  PhaseRegion region_;
  bool tuned_ = false;
  int since_tune_ = 0;
  int retunes_ = 0;
  int fallbacks_ = 0;
  GainCache cache_;
};

}  // namespace acclab

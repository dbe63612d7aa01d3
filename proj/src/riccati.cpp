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

#include "acclab/riccati.hpp"

#include <cmath>

namespace acclab {

void WeightSet::validate() const
{
  for (double v : {rho1, rho2, rho3}) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidParameter("weights: rho must be finite and >= 0");
  }
  if (!std::isfinite(r) || r <= 0.0) throw InvalidParameter("weights: r must be finite and > 0");
}

bool is_schur_stable(const Mat3& m)
{
  // Characteristic polynomial z^3 + a2 z^2 + a1 z + a0.
  const double tr = m.trace();
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const double a2 = -tr;
  const double a1 = minors;
  const double a0 = -m.determinant();
  if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(a2)) return false;
  // Jury conditions for a monic cubic.
  const double p1 = 1.0 + a2 + a1 + a0;
  const double pm1 = -1.0 + a2 - a1 + a0;
  return p1 > 0.0 && pm1 < 0.0 && std::abs(a0) < 1.0 && (1.0 - a0 * a0) > std::abs(a1 - a0 * a2);
}

Dare3 lqr_gain(const DiscreteSS& dss, const WeightSet& w, const RiccatiOptions& opts)
{
  w.validate();
  Eigen::Matrix<double, 1, 1> R;
  R(0, 0) = w.r;
  return solve_dare<3, 1>(dss.G, dss.H, w.Q(), R, opts);
}

double eval_cost(std::span<const Vec3> states, std::span<const double> inputs, const WeightSet& w)
{
  if (states.empty()) throw InvalidParameter("eval_cost: empty trajectory");
  if (states.size() != inputs.size()) throw InvalidParameter("eval_cost: states and inputs misaligned");
  double sum = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) sum += stage_cost(states[k], inputs[k], w);
  return sum / static_cast<double>(states.size());
}

}  // namespace acclab

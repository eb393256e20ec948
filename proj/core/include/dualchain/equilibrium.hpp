// Copyright 2026 The Dualchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DUALCHAIN_EQUILIBRIUM_HPP_
#define DUALCHAIN_EQUILIBRIUM_HPP_

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "dualchain/core.hpp"

namespace dualchain {

inline constexpr double kZoneTolerance = 1e-10;
inline constexpr int kBisectionIterations = 200;

// Unique root of N_in r^3 + N_de r (1 + k) - k N_de on (0, k/(1+k)). This is
// the r_b at which the A/fickle boundary reaches the edge r_f + r_b = 1.
double solve_alpha(const GameParams& params);
double solve_alpha(const GameConfig& config);

// Strategies whose payoff is within `tol` of the best decide the zone. Throws
// kDivergentState where any payoff diverges, i.e. at (0, 0) and (0, 1).
Zone zone_of(const MiningState& state, const GameParams& params,
             double tol = kZoneTolerance);
Zone zone_of(const MiningState& state, const GameConfig& config,
             double tol = kZoneTolerance);

// r_b on the curve where fickle and A-only payoffs tie, for a given r_f.
// Absent when the curve does not reach this r_f (r_f > 1 - alpha).
std::optional<double> boundary13_rb(double r_f, const GameParams& params);
std::optional<double> boundary13_rb(double r_f, const GameConfig& config);

// Same for the fickle / B-only tie. Absent for r_f > k; 0 at r_f = k.
std::optional<double> boundary23_rb(double r_f, const GameParams& params);
std::optional<double> boundary23_rb(double r_f, const GameConfig& config);

// r_f at which the fickle / A-only curve crosses r_b = c_stick. Requires
// alpha <= c_stick <= k/(1+k), otherwise throws kNotCase3.
double solve_beta(const GameParams& params, double c_stick);
double solve_beta(const GameConfig& config);

// {(r_f, r_b) : r_f_min <= r_f <= r_f_max}.
struct LackSegment {
  double r_f_min = 0.0;
  double r_f_max = 1.0;
  double r_b = 0.0;
};

struct EquilibriumSet {
  int case_tag = 0;
  std::optional<MiningState> coexist_point;
  std::variant<MiningState, LackSegment> lack;
  double alpha = 0.0;
  std::optional<double> beta;

  // Euclidean distances to the two kinds of equilibria. distance_to_coexist
  // is +inf when there is no coexistence point.
  double distance_to_coexist(const MiningState& s) const;
  double distance_to_lack(const MiningState& s) const;

  // Member states; the segment is represented by `segment_samples` evenly
  // spaced points including both ends.
  std::vector<MiningState> sample_points(int segment_samples = 11) const;
};

// Equilibrium set when every non-faction player has infinitesimal power.
EquilibriumSet equilibria(const GameConfig& config);

enum class Deviation {
  kNone,
  kFickleToA,
  kFickleToB,
  kAToFickle,
  kAToB,
  kBToFickle,
  kBToA,
};

std::string_view deviation_name(Deviation d);

struct DeviationReport {
  Strategy current_strategy = Strategy::kAOnly;
  Strategy best_strategy = Strategy::kAOnly;
  double current_payoff = 0.0;
  double best_payoff = 0.0;
  // best_payoff - current_payoff; zero when staying is optimal.
  double payoff_gain = 0.0;
  Deviation binding_inequality = Deviation::kNone;
};

// Compares the payoff of a player with power c_i against the payoffs it
// would get after moving its power to each other group. Ties keep the
// current strategy. Throws kPowerNotInGroup if the group holds less than c_i.
DeviationReport finite_deviation(const MiningState& state, double c_i,
                                 Strategy current, const GameConfig& config);

// Largest per-player r_f above which (r_f, 0) is stable for everyone.
// Throws kPowerExceedsK if some c_i >= k.
double x_threshold(const GameConfig& config);

}  // namespace dualchain

#endif  // DUALCHAIN_EQUILIBRIUM_HPP_

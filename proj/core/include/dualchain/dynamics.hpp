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

// Zone-driven flow in the (r_f, r_b) simplex and single-player best-response
// dynamics.
//
// The flow moves every axis by a fixed rate per step in the direction given
// by the current zone. Two refinements keep the discrete field well behaved
// where the continuous one slides along a boundary:
//
//  * Boundary13 moves (0, -) and Boundary23 moves (+, +): the tied groups
//    exchange nothing and the losing group leaves.
//  * If a step would immediately be undone by the next one (the two clamped
//    displacements have opposite signs on some axis) the state is treated
//    as lying on the boundary between the two zones: Zone2/Zone3 uses the
//    Boundary23 direction, Zone1/Zone3 the Boundary13 direction, and
//    Zone1/Zone2 (only adjacent at the coexistence point) stops.

#ifndef DUALCHAIN_DYNAMICS_HPP_
#define DUALCHAIN_DYNAMICS_HPP_

#include <cstdint>
#include <vector>

#include "dualchain/core.hpp"
#include "dualchain/equilibrium.hpp"

namespace dualchain {

// Piecewise-constant override: `value` applies from `at` onwards. `at` is a
// step index for the flow and a time in P_ag for the chain simulator.
struct ScheduleEntry {
  double at = 0.0;
  double value = 0.0;
};
using Schedule = std::vector<ScheduleEntry>;

// Value in effect at `t`, or `fallback` before the first entry. Entries must
// be sorted by `at`.
double schedule_value(const Schedule& schedule, double t, double fallback);
// Throws kInvalidArgument unless entries are sorted by strictly increasing at.
void check_schedule(const Schedule& schedule, std::string_view field);

struct FlowConfig {
  double migration_rate = 0.001;
  std::int64_t max_steps = 1'000'000;
  double convergence_eps = 0.005;
  double zone_tol = kZoneTolerance;
  Schedule k_schedule;
  Schedule c_stick_schedule;
  // When false only the initial and final states are kept.
  bool record_states = true;
};

// Throws kInvalidFlowConfig.
void validate_flow(const FlowConfig& flow);

enum class Outcome { kCoexistence, kLoyalLack, kUndecided };
std::string_view outcome_name(Outcome o);

struct Trajectory {
  std::vector<std::int64_t> steps;
  std::vector<MiningState> states;
  std::vector<Zone> zones;
  std::vector<double> k;
  std::vector<double> c_stick;
  Outcome outcome = Outcome::kUndecided;
  std::int64_t steps_used = 0;
};

struct Direction {
  int d_f = 0;
  int d_b = 0;
  friend bool operator==(const Direction&, const Direction&) = default;
};

Direction zone_direction(Zone z);

// Direction of the zone containing `state`. Throws kDivergentState at (0, 0).
Direction direction(const MiningState& state, const GameConfig& config,
                    double tol = kZoneTolerance);

// One flow step including clamping to r_f >= 0, r_b >= c_stick and
// r_f + r_b <= 1.
MiningState step_flow(const MiningState& state, const FlowConfig& flow,
                      const GameConfig& config);
MiningState step_flow(const MiningState& state, const GameParams& params,
                      double c_stick, double rate,
                      double tol = kZoneTolerance);

// Iterates step_flow until a fixed point or a period-2 cycle after the last
// schedule change, or max_steps. The outcome is judged against the
// equilibria of the final (k, c_stick).
Trajectory simulate_flow(const MiningState& initial, const FlowConfig& flow,
                         const GameConfig& config);

// Equilibrium set for explicit parameters, used when schedules move k or
// c_stick away from the validated config.
EquilibriumSet equilibria(const GameParams& params, double c_stick);

Outcome classify_outcome(const MiningState& state, const EquilibriumSet& eq,
                         double eps);

using Assignment = std::vector<Strategy>;

// Aggregate state of a per-player strategy assignment (faction power is
// always on B). Throws kInvalidArgument on size mismatch or kAutomatic.
MiningState state_of(const Assignment& assignment, const GameConfig& config);

// Largest deviation gain over all players.
double max_deviation_gain(const Assignment& assignment,
                          const GameConfig& config);

// One uniformly chosen player switches to its best response; ties keep the
// current strategy.
Assignment step_best_response(const Assignment& assignment,
                              const GameConfig& config, Rng& rng);
Assignment step_best_response(const Assignment& assignment,
                              const GameConfig& config, RngSeed seed);

struct BestResponseRun {
  Assignment final_assignment;
  std::vector<MiningState> states;
  std::int64_t steps = 0;
  bool converged = false;
};

// Steps until no player gains more than `gain_tol` or max_steps.
BestResponseRun run_best_response(const Assignment& initial,
                                  const GameConfig& config, RngSeed seed,
                                  std::int64_t max_steps = 100'000,
                                  double gain_tol = 1e-12);

// Automatic-mining power share from which the state drifts to r_b = c_stick.
double automatic_threshold(const GameConfig& config);

}  // namespace dualchain

#endif  // DUALCHAIN_DYNAMICS_HPP_

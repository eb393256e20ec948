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

// Block-level discrete-event simulation of two chains sharing one pool of
// hash power.
//
// Time is measured in P_ag (target block interval) and power as a fraction
// of the total. Difficulty is normalized: a chain with difficulty D and
// allocated power P finds blocks at rate P / D, so D equals the power that
// yields one block per P_ag. Every block pays 1 coin; rewards on chain B are
// converted to coin_A units with the price ratio k in effect when the block
// is found. Block rewards are split among the miners on the chain in
// proportion to their power.

#ifndef DUALCHAIN_CHAINSIM_HPP_
#define DUALCHAIN_CHAINSIM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dualchain/core.hpp"
#include "dualchain/dynamics.hpp"

namespace dualchain {

// Retarget every n blocks to D * n / (time taken by the last n blocks).
struct EpochFixed {
  std::int64_t n = 2016;
};

// EpochFixed plus an emergency decrease: once at least `eda_window` blocks
// have been found since the last adjustment, if the last `eda_window` blocks
// took longer than `eda_threshold` P_ag, D is multiplied by `eda_factor` and
// the epoch restarts.
struct EpochWithEda {
  std::int64_t n = 2016;
  std::int64_t eda_window = 6;
  double eda_threshold = 72.0;
  double eda_factor = 0.8;
};

// Retarget on every block to (sum of D over the last `window` blocks) /
// (time those blocks took), limited to a factor of 2 either way.
struct PerBlockWindow {
  std::int64_t window = 144;
};

using DifficultyRegime = std::variant<EpochFixed, EpochWithEda, PerBlockWindow>;

// Throws kInvalidRegime.
void validate_regime(const DifficultyRegime& regime);
// "epoch:N", "eda:N:WINDOW:THRESHOLD:FACTOR" or "window:W". Omitted EDA
// fields keep their defaults. Throws kInvalidRegime.
DifficultyRegime parse_regime(std::string_view spec);
std::string regime_to_string(const DifficultyRegime& regime);

enum class Coin { kA = 0, kB = 1 };

struct MinerAgent {
  std::string id;
  double power = 0.0;
  Strategy policy = Strategy::kAOnly;
  // Faction agents mine B unconditionally and never revise.
  bool faction = false;
  // Whether the agent takes part in policy revision (see SimOptions).
  bool revising = false;
};

// Throws kInvalidRoster unless powers are positive and sum to 1 within
// kPowerSumTolerance and every faction agent is BOnly.
void validate_roster(const std::vector<MinerAgent>& agents);

// Initial condition of a run. A non-positive difficulty_a defaults to the
// power outside BOnly agents and a non-positive difficulty_b to the BOnly
// power (1 if there is none).
struct ChainWorld {
  double difficulty_a = 0.0;
  double difficulty_b = 0.0;
  double k = 1.0;
  // Piecewise-constant k over time in P_ag.
  Schedule k_schedule;
};

struct SimOptions {
  double duration = 0.0;
  // Deterministic mode: every block takes exactly its expected time.
  bool deterministic = false;
  // Rewards and power before this time are excluded from the report.
  double warmup = 0.0;
  // Occupancy sample period; 0 disables sampling.
  double sample_interval = 1.0;
  bool record_events = false;
  bool record_difficulty_history = true;
  // Every interval one random revising agent adopts the candidate policy
  // with the best shadow density over the interval; 0 disables revision.
  double revision_interval = 0.0;
  std::vector<Strategy> revision_candidates{Strategy::kAOnly,
                                            Strategy::kBOnly};
  // Relative slack of the fickle switching comparisons.
  double switch_slack = 1e-9;
};

struct AgentResult {
  std::string id;
  double power = 0.0;
  Strategy initial_policy = Strategy::kAOnly;
  Strategy final_policy = Strategy::kAOnly;
  double reward = 0.0;
};

struct PolicyStats {
  double reward = 0.0;
  // Integral of the policy's total power over the accounted time.
  double power_time = 0.0;

  std::optional<double> density() const;
};

struct ChainStats {
  std::int64_t blocks = 0;
  // Blocks found after the warmup.
  std::int64_t accounted_blocks = 0;
  // Reward value of accounted blocks in coin_A units.
  double accounted_value = 0.0;
  double mean_interval = 0.0;
  // (time, difficulty) after each change, starting with the initial value.
  std::vector<std::pair<double, double>> difficulty_history;
};

struct FicklePhase {
  double start = 0.0;
  // Absent while the phase is still open at the horizon.
  std::optional<double> end;
};

struct Sample {
  double time = 0.0;
  double power_a = 0.0;
  double power_b = 0.0;
  double difficulty_a = 0.0;
  double difficulty_b = 0.0;
  double k = 0.0;
  double r_f_policy = 0.0;
  double r_b_policy = 0.0;
  bool fickle_on_b = false;
};

enum class EventType { kBlock, kDifficulty, kPrice, kSwitch, kRevision };
std::string_view event_type_name(EventType t);

struct EventRecord {
  double time = 0.0;
  Coin chain = Coin::kA;
  EventType type = EventType::kBlock;
  double difficulty_a = 0.0;
  double difficulty_b = 0.0;
  // Power of switching agents (fickle and automatic) currently on B.
  double r_f_active = 0.0;
  // Power of BOnly agents.
  double r_b_active = 0.0;
};

inline constexpr std::size_t kPolicyCount = 4;
inline std::size_t policy_index(Strategy s) { return static_cast<std::size_t>(s); }

struct SimReport {
  double duration = 0.0;
  double warmup = 0.0;
  std::vector<AgentResult> agents;
  std::array<PolicyStats, kPolicyCount> policies{};
  // Reward rate per unit power of an infinitesimal miner following each
  // policy, over the accounted time.
  std::array<double, kPolicyCount> shadow_density{};
  ChainStats chain_a;
  ChainStats chain_b;
  bool has_fickle = false;
  std::vector<FicklePhase> fickle_phases;
  // Completed fickle B-phases that started after the warmup.
  std::int64_t cycles = 0;
  std::vector<Sample> samples;
  std::vector<EventRecord> events;
};

// Runs one world. Throws kInvalidRoster, kInvalidRegime, kInvalidArgument or
// kZeroPowerChain (chain A has no power at start, so it can never retarget).
SimReport run(const ChainWorld& world, const std::vector<MinerAgent>& agents,
              const DifficultyRegime& regime_a,
              const DifficultyRegime& regime_b, const SimOptions& options,
              RngSeed seed);

struct PolicyDensities {
  std::array<std::optional<double>, kPolicyCount> density{};

  std::optional<double> get(Strategy s) const {
    return density[policy_index(s)];
  }
};

inline constexpr std::int64_t kMinFickleCycles = 50;

// Per-policy reward / accounted power-time. Throws kInsufficientCycles when
// fickle agents exist and fewer than kMinFickleCycles cycles completed.
PolicyDensities empirical_payoffs(const SimReport& report);

// Mean number of B blocks found after the difficulty rises to r_f + r_b and
// only r_b keeps mining, until either the EDA fires or the epoch ends.
double eda_expected_nde(const MiningState& state, const EpochWithEda& regime,
                        RngSeed seed, int trials = 10'000);

}  // namespace dualchain

#endif  // DUALCHAIN_CHAINSIM_HPP_

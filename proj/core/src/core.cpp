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

#include "dualchain/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dualchain {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveK: return "non_positive_k";
    case ErrorCode::kKAboveOne: return "k_above_one";
    case ErrorCode::kZeroBlockCount: return "zero_block_count";
    case ErrorCode::kPowerSumMismatch: return "power_sum_mismatch";
    case ErrorCode::kNegativePower: return "negative_power";
    case ErrorCode::kCStickOutOfRange: return "c_stick_out_of_range";
    case ErrorCode::kEmptyPowers: return "empty_powers";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kDegenerateState: return "degenerate_state";
    case ErrorCode::kDivergentPayoff: return "divergent_payoff";
    case ErrorCode::kAutomaticNotAnalytic: return "automatic_not_analytic";
    case ErrorCode::kDivergentState: return "divergent_state";
    case ErrorCode::kNotCase3: return "not_case3";
    case ErrorCode::kPowerNotInGroup: return "power_not_in_group";
    case ErrorCode::kPowerExceedsK: return "power_exceeds_k";
    case ErrorCode::kInvalidFlowConfig: return "invalid_flow_config";
    case ErrorCode::kInvalidRoster: return "invalid_roster";
    case ErrorCode::kInvalidRegime: return "invalid_regime";
    case ErrorCode::kZeroPowerChain: return "zero_power_chain";
    case ErrorCode::kInsufficientCycles: return "insufficient_cycles";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kEmptySeries: return "empty_series";
    case ErrorCode::kNoBaseline: return "no_baseline";
    case ErrorCode::kUnresolvableState: return "unresolvable_state";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

GameConfig validate_config(const RawGameConfig& raw, bool renormalize) {
  if (!(raw.k > 0.0)) {
    throw Error(ErrorCode::kNonPositiveK, "k must be positive", "k");
  }
  if (raw.k > 1.0) {
    throw Error(ErrorCode::kKAboveOne,
                "k must not exceed 1; relabel the coins instead", "k");
  }
  if (raw.n_in < 1) {
    throw Error(ErrorCode::kZeroBlockCount, "n_in must be at least 1", "n_in");
  }
  if (raw.n_de < 1) {
    throw Error(ErrorCode::kZeroBlockCount, "n_de must be at least 1", "n_de");
  }
  if (!(raw.c_stick >= 0.0 && raw.c_stick < 1.0)) {
    throw Error(ErrorCode::kCStickOutOfRange, "c_stick must lie in [0, 1)",
                "c_stick");
  }
  for (double p : raw.powers) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kNegativePower,
                  "every player power must be positive and finite", "powers");
    }
  }
  const double sum = std::accumulate(raw.powers.begin(), raw.powers.end(), 0.0);

  GameConfig config;
  config.k_ = raw.k;
  config.n_in_ = raw.n_in;
  config.n_de_ = raw.n_de;
  config.c_stick_ = raw.c_stick;
  config.powers_ = raw.powers;

  if (std::abs(raw.c_stick + sum - 1.0) > kPowerSumTolerance) {
    if (!renormalize || sum <= 0.0) {
      std::ostringstream msg;
      msg << "c_stick + sum(powers) = " << raw.c_stick + sum
          << ", expected 1";
      throw Error(ErrorCode::kPowerSumMismatch, msg.str(), "powers");
    }
    const double scale = (1.0 - raw.c_stick) / sum;
    for (double& p : config.powers_) p *= scale;
  }
  return config;
}

GameConfig make_uniform_config(double k, std::int64_t n_in, std::int64_t n_de,
                               double c_stick, int n_players) {
  if (n_players < 1) {
    throw Error(ErrorCode::kEmptyPowers, "need at least one player", "powers");
  }
  RawGameConfig raw{k, n_in, n_de, c_stick,
                    std::vector<double>(static_cast<std::size_t>(n_players),
                                        (1.0 - c_stick) / n_players)};
  return validate_config(raw);
}

double c_max(const GameConfig& config) {
  if (config.powers().empty()) {
    throw Error(ErrorCode::kEmptyPowers, "no non-faction players", "powers");
  }
  return *std::max_element(config.powers().begin(), config.powers().end());
}

bool is_valid_state(const MiningState& s) {
  return std::isfinite(s.r_f) && std::isfinite(s.r_b) &&
         s.r_f >= -kStateSlack && s.r_b >= -kStateSlack &&
         s.r_f + s.r_b <= 1.0 + kStateSlack;
}

void check_state(const MiningState& s) {
  if (!is_valid_state(s)) {
    std::ostringstream msg;
    msg << "state (" << s.r_f << ", " << s.r_b
        << ") is outside the power simplex";
    throw Error(ErrorCode::kInvalidState, msg.str(), "state");
  }
}

void check_state(const MiningState& s, const GameConfig& config) {
  check_state(s);
  if (s.r_b < config.c_stick() - kStateSlack) {
    std::ostringstream msg;
    msg << "r_b = " << s.r_b << " is below c_stick = " << config.c_stick();
    throw Error(ErrorCode::kInvalidState, msg.str(), "state");
  }
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kFickle: return "fickle";
    case Strategy::kAOnly: return "a_only";
    case Strategy::kBOnly: return "b_only";
    case Strategy::kAutomatic: return "automatic";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::kFickle, Strategy::kAOnly, Strategy::kBOnly,
                     Strategy::kAutomatic}) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view zone_name(Zone z) {
  switch (z) {
    case Zone::kZone1: return "zone1";
    case Zone::kZone2: return "zone2";
    case Zone::kZone3: return "zone3";
    case Zone::kBoundary13: return "boundary13";
    case Zone::kBoundary23: return "boundary23";
    case Zone::kCoexistPoint: return "coexist_point";
  }
  return "unknown";
}

Rng::Rng(RngSeed seed) : engine_(seed.value) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::exponential() { return -std::log1p(-uniform()); }

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling keeps the result unbiased for every n.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

RngSeed derive_seed(RngSeed parent, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = parent.value + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return RngSeed{z ^ (z >> 31)};
}

}  // namespace dualchain

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

// Shared domain vocabulary for the two-coin mining game: parameters, the
// (r_f, r_b) state, strategies, zones and seeded randomness.

#ifndef DUALCHAIN_CORE_HPP_
#define DUALCHAIN_CORE_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "dualchain/error.hpp"

namespace dualchain {

inline constexpr double kPowerSumTolerance = 1e-9;

// The three scalars every payoff formula depends on. Block counts are kept
// as doubles because only their ratio and products enter the formulas.
struct GameParams {
  double k = 1.0;
  double n_in = 2016.0;
  double n_de = 2016.0;

  // Location of the coexistence point (0, k/(1+k)).
  double coexist_rb() const { return k / (1.0 + k); }
};

// Unvalidated user input, e.g. straight from a JSON file.
struct RawGameConfig {
  double k = 0.0;
  std::int64_t n_in = 0;
  std::int64_t n_de = 0;
  double c_stick = 0.0;
  std::vector<double> powers;
};

// Validated game parameters. Only `validate_config` produces instances, so
// holding a GameConfig means 0 < k <= 1, block counts >= 1 and
// c_stick + sum(powers) == 1 within kPowerSumTolerance.
class GameConfig {
 public:
  double k() const { return k_; }
  std::int64_t n_in() const { return n_in_; }
  std::int64_t n_de() const { return n_de_; }
  double c_stick() const { return c_stick_; }
  const std::vector<double>& powers() const { return powers_; }

  GameParams params() const {
    return GameParams{k_, static_cast<double>(n_in_),
                      static_cast<double>(n_de_)};
  }
  RawGameConfig raw() const { return {k_, n_in_, n_de_, c_stick_, powers_}; }

  friend bool operator==(const GameConfig&, const GameConfig&) = default;

 private:
  friend GameConfig validate_config(const RawGameConfig&, bool);
  GameConfig() = default;

  double k_ = 1.0;
  std::int64_t n_in_ = 1;
  std::int64_t n_de_ = 1;
  double c_stick_ = 0.0;
  std::vector<double> powers_;
};

// Checks the parameter bounds. With `renormalize`, powers are rescaled so
// that c_stick + sum(powers) == 1 instead of failing on a mismatch.
GameConfig validate_config(const RawGameConfig& raw, bool renormalize = false);

// `n_players` equal non-faction players sharing 1 - c_stick.
GameConfig make_uniform_config(double k, std::int64_t n_in, std::int64_t n_de,
                               double c_stick, int n_players);

// Largest non-faction player power (excludes c_stick).
double c_max(const GameConfig& config);

struct MiningState {
  double r_f = 0.0;
  double r_b = 0.0;

  double r_a() const { return 1.0 - r_f - r_b; }
  friend bool operator==(const MiningState&, const MiningState&) = default;
};

inline constexpr double kStateSlack = 1e-12;

bool is_valid_state(const MiningState& s);
// Throws kInvalidState unless r_f, r_b >= 0 and r_f + r_b <= 1.
void check_state(const MiningState& s);
// Additionally requires r_b >= c_stick.
void check_state(const MiningState& s, const GameConfig& config);

enum class Strategy { kFickle, kAOnly, kBOnly, kAutomatic };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

enum class Zone {
  kZone1,         // coin_A-only mining strictly best
  kZone2,         // coin_B-only mining strictly best
  kZone3,         // fickle mining strictly best
  kBoundary13,    // fickle ties A-only, both beat B-only
  kBoundary23,    // fickle ties B-only, both beat A-only
  kCoexistPoint,  // all three payoffs tie
};

std::string_view zone_name(Zone z);

struct RngSeed {
  std::uint64_t value = 0;
};

// Deterministic generator. The engine is std::mt19937_64 (fully specified by
// the standard); distributions are derived from its raw output here instead
// of <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(RngSeed seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Exponential with unit mean.
  double exponential();
  // Uniform integer on [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent child seed, e.g. one per replica.
RngSeed derive_seed(RngSeed parent, std::uint64_t stream);

}  // namespace dualchain

#endif  // DUALCHAIN_CORE_HPP_

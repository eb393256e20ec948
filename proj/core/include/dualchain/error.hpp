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

#ifndef DUALCHAIN_ERROR_HPP_
#define DUALCHAIN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dualchain {

enum class ErrorCode {
  // core
  kNonPositiveK,
  kKAboveOne,
  kZeroBlockCount,
  kPowerSumMismatch,
  kNegativePower,
  kCStickOutOfRange,
  kEmptyPowers,
  kInvalidState,
  // payoff
  kDegenerateState,
  kDivergentPayoff,
  kAutomaticNotAnalytic,
  // equilibrium
  kDivergentState,
  kNotCase3,
  kPowerNotInGroup,
  kPowerExceedsK,
  // dynamics / chainsim
  kInvalidFlowConfig,
  kInvalidRoster,
  kInvalidRegime,
  kZeroPowerChain,
  kInsufficientCycles,
  // ingest
  kParseError,
  kInvariantViolation,
  kEmptySeries,
  kNoBaseline,
  kUnresolvableState,
  // plumbing
  kInvalidArgument,
  kIoError,
};

// Stable snake_case identifier used in machine-readable error output.
std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception type. `field`
// names the offending input (config key, CSV column, CLI flag) when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace dualchain

#endif  // DUALCHAIN_ERROR_HPP_

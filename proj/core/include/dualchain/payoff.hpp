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

// Analytic profit densities of the three static strategies.
//
// All densities are in coin_A units per P_ag per unit of mining power. The
// per-player power c_i cancels out of every density, so it does not appear
// here except in ap_fickle, which is a raw reward rate.
//
// With s = r_f + r_b and b = r_b the densities reduce to
//
//   W   = N_in b^2 + N_de s^2
//   D   = (1 - s) N_in b^2 + (1 - b) N_de s^2
//   U_A = W / D
//   U_F = (k N_in b + U_A N_de s^2) / W
//   U_B = k (N_in b + N_de s) / W
//
// On r_b = 0 with r_f > 0 these give U_A = U_F = 1 and U_B = k / r_f, which
// are the limits used for the degenerate states. (0, 0) makes U_F and U_B
// divergent; (0, 1) makes U_A and U_F divergent.

#ifndef DUALCHAIN_PAYOFF_HPP_
#define DUALCHAIN_PAYOFF_HPP_

#include <optional>

#include "dualchain/core.hpp"

namespace dualchain {

// A missing component means the density diverges at that state.
struct PayoffTriple {
  std::optional<double> u_f;
  std::optional<double> u_a;
  std::optional<double> u_b;

  std::optional<double> get(Strategy s) const;
};

// Average coin_A reward per P_ag of a fickle player with power c_i.
// Throws kDegenerateState when r_b == 0.
double ap_fickle(const MiningState& state, const GameParams& params,
                 double c_i);
double ap_fickle(const MiningState& state, const GameConfig& config,
                 double c_i);

// Throws kAutomaticNotAnalytic for Strategy::kAutomatic and
// kDivergentPayoff where the requested density diverges.
double payoff(Strategy strategy, const MiningState& state,
              const GameParams& params);
double payoff(Strategy strategy, const MiningState& state,
              const GameConfig& config);

PayoffTriple payoff_triple(const MiningState& state, const GameParams& params);
PayoffTriple payoff_triple(const MiningState& state, const GameConfig& config);

}  // namespace dualchain

#endif  // DUALCHAIN_PAYOFF_HPP_

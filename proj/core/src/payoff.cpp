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

#include "dualchain/payoff.hpp"

#include <algorithm>
#include <sstream>

namespace dualchain {
namespace {

struct Terms {
  double w;
  double d;
};

Terms terms(const MiningState& st, const GameParams& p) {
  const double b = st.r_b;
  const double s = st.r_f + st.r_b;
  const double in = p.n_in * b * b;
  const double de = p.n_de * s * s;
  // r_a is computed from the state rather than 1 - s so that states on the
  // simplex edge give an exact zero.
  const double r_a = std::max(0.0, st.r_a());
  return {in + de, r_a * in + (1.0 - b) * de};
}

std::optional<double> u_a(const MiningState& st, const GameParams& p) {
  if (st.r_f == 0.0 && st.r_b == 0.0) return 1.0;
  const Terms t = terms(st, p);
  if (!(t.d > 0.0)) return std::nullopt;
  return t.w / t.d;
}

std::optional<double> u_f(const MiningState& st, const GameParams& p) {
  const std::optional<double> a = u_a(st, p);
  if (!a || (st.r_f == 0.0 && st.r_b == 0.0)) return std::nullopt;
  const double b = st.r_b;
  const double s = st.r_f + st.r_b;
  const Terms t = terms(st, p);
  return (p.k * p.n_in * b + *a * p.n_de * s * s) / t.w;
}

std::optional<double> u_b(const MiningState& st, const GameParams& p) {
  if (st.r_f == 0.0 && st.r_b == 0.0) return std::nullopt;
  const double b = st.r_b;
  const double s = st.r_f + st.r_b;
  const Terms t = terms(st, p);
  return p.k * (p.n_in * b + p.n_de * s) / t.w;
}

[[noreturn]] void throw_divergent(Strategy s, const MiningState& st) {
  std::ostringstream msg;
  msg << strategy_name(s) << " payoff diverges at (" << st.r_f << ", "
      << st.r_b << ")";
  throw Error(ErrorCode::kDivergentPayoff, msg.str(), "state");
}

}  // namespace

std::optional<double> PayoffTriple::get(Strategy s) const {
  switch (s) {
    case Strategy::kFickle: return u_f;
    case Strategy::kAOnly: return u_a;
    case Strategy::kBOnly: return u_b;
    case Strategy::kAutomatic: break;
  }
  throw Error(ErrorCode::kAutomaticNotAnalytic,
              "automatic mining has no analytic payoff", "strategy");
}

double ap_fickle(const MiningState& state, const GameParams& params,
                 double c_i) {
  check_state(state);
  if (state.r_b == 0.0) {
    throw Error(ErrorCode::kDegenerateState,
                "AP_F is undefined when r_b = 0", "state");
  }
  if (!(c_i > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "c_i must be positive", "c_i");
  }
  const std::optional<double> a = u_a(state, params);
  if (!a) throw_divergent(Strategy::kAOnly, state);
  return c_i * *a;
}

double ap_fickle(const MiningState& state, const GameConfig& config,
                 double c_i) {
  return ap_fickle(state, config.params(), c_i);
}

double payoff(Strategy strategy, const MiningState& state,
              const GameParams& params) {
  if (strategy == Strategy::kAutomatic) {
    throw Error(ErrorCode::kAutomaticNotAnalytic,
                "automatic mining has no analytic payoff", "strategy");
  }
  check_state(state);
  std::optional<double> v;
  switch (strategy) {
    case Strategy::kFickle: v = u_f(state, params); break;
    case Strategy::kAOnly: v = u_a(state, params); break;
    case Strategy::kBOnly: v = u_b(state, params); break;
    case Strategy::kAutomatic: break;
  }
  if (!v) throw_divergent(strategy, state);
  return *v;
}

double payoff(Strategy strategy, const MiningState& state,
              const GameConfig& config) {
  return payoff(strategy, state, config.params());
}

PayoffTriple payoff_triple(const MiningState& state,
                           const GameParams& params) {
  check_state(state);
  return {u_f(state, params), u_a(state, params), u_b(state, params)};
}

PayoffTriple payoff_triple(const MiningState& state,
                           const GameConfig& config) {
  return payoff_triple(state, config.params());
}

}  // namespace dualchain

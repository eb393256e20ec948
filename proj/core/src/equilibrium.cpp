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

#include "dualchain/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dualchain/payoff.hpp"

namespace dualchain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGroupSlack = 1e-12;

// Bisection for a function that is positive at lo and non-positive at hi
// (or the reverse when `increasing`). Returns the bracket midpoint.
template <typename F>
double bisect(F&& f, double lo, double hi, bool increasing) {
  for (int i = 0; i < kBisectionIterations && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    const bool right = increasing ? v < 0.0 : v > 0.0;
    if (right) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// With W and D as in payoff.hpp, u_f - u_a has the sign of k D - b W and
// u_f - u_b has the sign of s W - k D. Multiplying through avoids dividing
// by D, which vanishes at the simplex corners.
struct WD {
  double w;
  double d;
};

WD wd(double r_f, double r_b, const GameParams& p) {
  const double s = r_f + r_b;
  const double in = p.n_in * r_b * r_b;
  const double de = p.n_de * s * s;
  const double r_a = std::max(0.0, 1.0 - s);
  return {in + de, r_a * in + (1.0 - r_b) * de};
}

double sign13(double r_f, double r_b, const GameParams& p) {
  const WD t = wd(r_f, r_b, p);
  return p.k * t.d - r_b * t.w;
}

double sign23(double r_f, double r_b, const GameParams& p) {
  const WD t = wd(r_f, r_b, p);
  return (r_f + r_b) * t.w - p.k * t.d;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double solve_alpha(const GameParams& params) {
  const double hi = params.k / (1.0 + params.k);
  auto f = [&](double r) {
    return params.n_in * r * r * r + params.n_de * r * (1.0 + params.k) -
           params.k * params.n_de;
  };
  return bisect(f, 0.0, hi, true);
}

double solve_alpha(const GameConfig& config) {
  return solve_alpha(config.params());
}

Zone zone_of(const MiningState& state, const GameParams& params, double tol) {
  const PayoffTriple t = payoff_triple(state, params);
  if (!t.u_f || !t.u_a || !t.u_b) {
    std::ostringstream msg;
    msg << "payoffs diverge at (" << state.r_f << ", " << state.r_b << ")";
    throw Error(ErrorCode::kDivergentState, msg.str(), "state");
  }
  const double best = std::max({*t.u_f, *t.u_a, *t.u_b});
  const bool f = best - *t.u_f <= tol;
  const bool a = best - *t.u_a <= tol;
  const bool b = best - *t.u_b <= tol;
  if (f && a && b) return Zone::kCoexistPoint;
  if (f && a) return Zone::kBoundary13;
  if (f && b) return Zone::kBoundary23;
  // A and B tying above fickle cannot happen on the analytic surface away
  // from the coexistence point; treat it as that point.
  if (a && b) return Zone::kCoexistPoint;
  if (a) return Zone::kZone1;
  if (b) return Zone::kZone2;
  return Zone::kZone3;
}

Zone zone_of(const MiningState& state, const GameConfig& config, double tol) {
  return zone_of(state, config.params(), tol);
}

std::optional<double> boundary13_rb(double r_f, const GameParams& params) {
  r_f = clamp_unit(r_f);
  const double hi = 1.0 - r_f;
  if (hi <= 0.0) return std::nullopt;
  // The sign is positive as r_b -> 0 and decreasing in r_b.
  const double at_hi = sign13(r_f, hi, params);
  if (at_hi > 0.0) return std::nullopt;
  if (at_hi == 0.0) return hi;
  return bisect([&](double b) { return sign13(r_f, b, params); }, 0.0, hi,
                false);
}

std::optional<double> boundary13_rb(double r_f, const GameConfig& config) {
  return boundary13_rb(r_f, config.params());
}

std::optional<double> boundary23_rb(double r_f, const GameParams& params) {
  r_f = clamp_unit(r_f);
  if (r_f > params.k) return std::nullopt;
  if (r_f == params.k) return 0.0;
  const double hi = 1.0 - r_f;
  // Negative as r_b -> 0 (r_f < k) and increasing in r_b.
  if (sign23(r_f, hi, params) < 0.0) return std::nullopt;
  return bisect([&](double b) { return sign23(r_f, b, params); }, 0.0, hi,
                true);
}

std::optional<double> boundary23_rb(double r_f, const GameConfig& config) {
  return boundary23_rb(r_f, config.params());
}

double solve_beta(const GameParams& params, double c_stick) {
  const double alpha = solve_alpha(params);
  const double top = params.coexist_rb();
  if (c_stick < alpha - 1e-12 || c_stick > top) {
    std::ostringstream msg;
    msg << "c_stick = " << c_stick << " is outside [alpha, k/(1+k)] = ["
        << alpha << ", " << top << "]";
    throw Error(ErrorCode::kNotCase3, msg.str(), "c_stick");
  }
  const double hi = std::max(0.0, 1.0 - c_stick);
  if (sign13(0.0, c_stick, params) <= 0.0) return 0.0;
  if (sign13(hi, c_stick, params) >= 0.0) return hi;
  return bisect([&](double r_f) { return sign13(r_f, c_stick, params); }, 0.0,
                hi, false);
}

double solve_beta(const GameConfig& config) {
  return solve_beta(config.params(), config.c_stick());
}

double EquilibriumSet::distance_to_coexist(const MiningState& s) const {
  if (!coexist_point) return kInf;
  return std::hypot(s.r_f - coexist_point->r_f, s.r_b - coexist_point->r_b);
}

double EquilibriumSet::distance_to_lack(const MiningState& s) const {
  if (const auto* p = std::get_if<MiningState>(&lack)) {
    return std::hypot(s.r_f - p->r_f, s.r_b - p->r_b);
  }
  const auto& seg = std::get<LackSegment>(lack);
  const double r_f = std::clamp(s.r_f, seg.r_f_min, seg.r_f_max);
  return std::hypot(s.r_f - r_f, s.r_b - seg.r_b);
}

std::vector<MiningState> EquilibriumSet::sample_points(
    int segment_samples) const {
  std::vector<MiningState> out;
  if (coexist_point) out.push_back(*coexist_point);
  if (const auto* p = std::get_if<MiningState>(&lack)) {
    out.push_back(*p);
    return out;
  }
  const auto& seg = std::get<LackSegment>(lack);
  const int n = std::max(2, segment_samples);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out.push_back({seg.r_f_min + t * (seg.r_f_max - seg.r_f_min), seg.r_b});
  }
  return out;
}

EquilibriumSet equilibria(const GameConfig& config) {
  const GameParams p = config.params();
  const double c = config.c_stick();
  EquilibriumSet set;
  set.alpha = solve_alpha(p);
  const MiningState coexist{0.0, p.coexist_rb()};
  if (c == 0.0) {
    set.case_tag = 1;
    set.coexist_point = coexist;
    set.lack = LackSegment{p.k, 1.0, 0.0};
  } else if (c <= set.alpha) {
    set.case_tag = 2;
    set.coexist_point = coexist;
    set.lack = MiningState{1.0 - c, c};
  } else if (c <= p.coexist_rb()) {
    set.case_tag = 3;
    set.coexist_point = coexist;
    set.beta = solve_beta(p, c);
    set.lack = MiningState{*set.beta, c};
  } else {
    set.case_tag = 4;
    set.lack = MiningState{0.0, c};
  }
  return set;
}

std::string_view deviation_name(Deviation d) {
  switch (d) {
    case Deviation::kNone: return "none";
    case Deviation::kFickleToA: return "fickle_to_a";
    case Deviation::kFickleToB: return "fickle_to_b";
    case Deviation::kAToFickle: return "a_to_fickle";
    case Deviation::kAToB: return "a_to_b";
    case Deviation::kBToFickle: return "b_to_fickle";
    case Deviation::kBToA: return "b_to_a";
  }
  return "unknown";
}

DeviationReport finite_deviation(const MiningState& state, double c_i,
                                 Strategy current, const GameConfig& config) {
  if (current == Strategy::kAutomatic) {
    throw Error(ErrorCode::kAutomaticNotAnalytic,
                "automatic mining has no analytic payoff", "strategy");
  }
  check_state(state, config);
  if (!(c_i > 0.0)) {
    throw Error(ErrorCode::kPowerNotInGroup, "c_i must be positive", "c_i");
  }
  double group = 0.0;
  switch (current) {
    case Strategy::kFickle: group = state.r_f; break;
    case Strategy::kAOnly: group = state.r_a(); break;
    case Strategy::kBOnly: group = state.r_b - config.c_stick(); break;
    case Strategy::kAutomatic: break;
  }
  if (c_i > group + kGroupSlack) {
    std::ostringstream msg;
    msg << "c_i = " << c_i << " exceeds the " << strategy_name(current)
        << " group power " << group;
    throw Error(ErrorCode::kPowerNotInGroup, msg.str(), "c_i");
  }

  const GameParams p = config.params();
  auto eval = [&](Strategy s, double r_f, double r_b) {
    const MiningState shifted{std::max(0.0, r_f), std::max(0.0, r_b)};
    return payoff_triple(shifted, p).get(s).value_or(kInf);
  };

  const double f = state.r_f;
  const double b = state.r_b;
  struct Alt {
    Strategy s;
    double value;
    Deviation id;
  };
  double here = 0.0;
  Alt alts[2];
  switch (current) {
    case Strategy::kFickle:
      here = eval(Strategy::kFickle, f, b);
      alts[0] = {Strategy::kAOnly, eval(Strategy::kAOnly, f - c_i, b),
                 Deviation::kFickleToA};
      alts[1] = {Strategy::kBOnly, eval(Strategy::kBOnly, f - c_i, b + c_i),
                 Deviation::kFickleToB};
      break;
    case Strategy::kAOnly:
      here = eval(Strategy::kAOnly, f, b);
      alts[0] = {Strategy::kFickle, eval(Strategy::kFickle, f + c_i, b),
                 Deviation::kAToFickle};
      alts[1] = {Strategy::kBOnly, eval(Strategy::kBOnly, f, b + c_i),
                 Deviation::kAToB};
      break;
    case Strategy::kBOnly:
      here = eval(Strategy::kBOnly, f, b);
      alts[0] = {Strategy::kFickle, eval(Strategy::kFickle, f + c_i, b - c_i),
                 Deviation::kBToFickle};
      alts[1] = {Strategy::kAOnly, eval(Strategy::kAOnly, f, b - c_i),
                 Deviation::kBToA};
      break;
    case Strategy::kAutomatic:
      break;
  }

  DeviationReport report;
  report.current_strategy = current;
  report.best_strategy = current;
  report.current_payoff = here;
  report.best_payoff = here;
  for (const Alt& alt : alts) {
    if (alt.value > report.best_payoff) {
      report.best_strategy = alt.s;
      report.best_payoff = alt.value;
      report.binding_inequality = alt.id;
    }
  }
  report.payoff_gain = report.best_payoff - here;
  return report;
}

double x_threshold(const GameConfig& config) {
  if (config.powers().empty()) {
    throw Error(ErrorCode::kEmptyPowers, "no non-faction players", "powers");
  }
  const double k = config.k();
  const double n_in = static_cast<double>(config.n_in());
  const double n_de = static_cast<double>(config.n_de());
  double x = -kInf;
  for (double c : config.powers()) {
    if (c >= k) {
      std::ostringstream msg;
      msg << "player power " << c << " is not below k = " << k;
      throw Error(ErrorCode::kPowerExceedsK, msg.str(), "powers");
    }
    const double disc = n_de * n_de * k * k + 4.0 * n_de * n_in * (k * c - c * c);
    x = std::max(x, k / 2.0 + std::sqrt(disc) / (2.0 * n_de));
  }
  return x;
}

}  // namespace dualchain

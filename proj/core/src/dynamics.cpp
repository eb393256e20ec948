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

#include "dualchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dualchain/payoff.hpp"

namespace dualchain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCycleTol = 1e-12;

// Zone classification that orders divergent payoffs above every finite one
// instead of failing, so the flow is defined on the whole simplex.
Zone flow_zone(const MiningState& s, const GameParams& p, double tol) {
  const PayoffTriple t = payoff_triple(s, p);
  const double f = t.u_f.value_or(kInf);
  const double a = t.u_a.value_or(kInf);
  const double b = t.u_b.value_or(kInf);
  const double best = std::max({f, a, b});
  auto top = [&](double v) {
    return best == kInf ? v == kInf : best - v <= tol;
  };
  const bool tf = top(f), ta = top(a), tb = top(b);
  if (tf && ta && tb) return Zone::kCoexistPoint;
  if (tf && ta) return Zone::kBoundary13;
  if (tf && tb) return Zone::kBoundary23;
  if (ta && tb) return Zone::kCoexistPoint;
  if (ta) return Zone::kZone1;
  if (tb) return Zone::kZone2;
  return Zone::kZone3;
}

MiningState clamp_to(MiningState s, const MiningState& from, double c) {
  s.r_f = std::max(s.r_f, 0.0);
  s.r_b = std::max(s.r_b, c);
  const double excess = s.r_f + s.r_b - 1.0;
  if (excess > 0.0) {
    const bool f_up = s.r_f > from.r_f;
    const bool b_up = s.r_b > from.r_b;
    if (f_up && b_up) {
      s.r_f -= excess / 2.0;
      s.r_b -= excess / 2.0;
    } else if (b_up) {
      s.r_b -= excess;
    } else {
      s.r_f -= excess;
    }
    if (s.r_b < c) {
      s.r_f -= c - s.r_b;
      s.r_b = c;
    }
    s.r_f = std::max(s.r_f, 0.0);
  }
  return s;
}

MiningState move(const MiningState& s, Direction d, double rate, double c) {
  return clamp_to({s.r_f + d.d_f * rate, s.r_b + d.d_b * rate}, s, c);
}

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

bool is_pair(Zone a, Zone b, Zone x, Zone y) {
  return (a == x && b == y) || (a == y && b == x);
}

Direction resolve_chatter(Zone z1, Zone z2, Direction d1, Direction d2) {
  if (is_pair(z1, z2, Zone::kZone2, Zone::kZone3)) {
    return zone_direction(Zone::kBoundary23);
  }
  if (is_pair(z1, z2, Zone::kZone1, Zone::kZone3)) {
    return zone_direction(Zone::kBoundary13);
  }
  if (is_pair(z1, z2, Zone::kZone1, Zone::kZone2)) return {0, 0};
  // Other combinations only occur next to the coexistence point; keep the
  // axes on which both directions agree.
  return {d1.d_f == d2.d_f ? d1.d_f : 0, d1.d_b == d2.d_b ? d1.d_b : 0};
}

// Raises r_b to a new c_stick, taking the power from fickle miners when the
// simplex edge is hit.
MiningState lift_to(MiningState s, double c) {
  if (s.r_b < c) {
    s.r_b = c;
    s.r_f = std::max(0.0, std::min(s.r_f, 1.0 - c));
  }
  return s;
}

bool near(const MiningState& a, const MiningState& b) {
  return std::abs(a.r_f - b.r_f) <= kCycleTol &&
         std::abs(a.r_b - b.r_b) <= kCycleTol;
}

double last_change(const Schedule& s) { return s.empty() ? 0.0 : s.back().at; }

// Smallest schedule time strictly greater than t, or +inf.
double next_change(const Schedule& a, const Schedule& b, double t) {
  double best = kInf;
  for (const Schedule* s : {&a, &b}) {
    for (const ScheduleEntry& e : *s) {
      if (e.at > t) {
        best = std::min(best, e.at);
        break;
      }
    }
  }
  return best;
}

}  // namespace

double schedule_value(const Schedule& schedule, double t, double fallback) {
  double v = fallback;
  for (const ScheduleEntry& e : schedule) {
    if (e.at > t) break;
    v = e.value;
  }
  return v;
}

void check_schedule(const Schedule& schedule, std::string_view field) {
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!std::isfinite(schedule[i].at) || !std::isfinite(schedule[i].value) ||
        (i > 0 && schedule[i].at <= schedule[i - 1].at)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "schedule entries must be finite with increasing times",
                  std::string(field));
    }
  }
}

void validate_flow(const FlowConfig& flow) {
  if (!(flow.migration_rate > 0.0 && flow.migration_rate <= 0.1)) {
    throw Error(ErrorCode::kInvalidFlowConfig,
                "migration_rate must lie in (0, 0.1]", "migration_rate");
  }
  if (!(flow.convergence_eps > 0.0)) {
    throw Error(ErrorCode::kInvalidFlowConfig,
                "convergence_eps must be positive", "convergence_eps");
  }
  if (flow.max_steps < 0) {
    throw Error(ErrorCode::kInvalidFlowConfig, "max_steps must be >= 0",
                "max_steps");
  }
  if (!(flow.zone_tol >= 0.0)) {
    throw Error(ErrorCode::kInvalidFlowConfig, "zone_tol must be >= 0",
                "zone_tol");
  }
  try {
    check_schedule(flow.k_schedule, "k_schedule");
    check_schedule(flow.c_stick_schedule, "c_stick_schedule");
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidFlowConfig, e.what(), e.field());
  }
  for (const ScheduleEntry& e : flow.k_schedule) {
    if (!(e.value > 0.0 && e.value <= 1.0)) {
      throw Error(ErrorCode::kInvalidFlowConfig,
                  "scheduled k must lie in (0, 1]", "k_schedule");
    }
  }
  for (const ScheduleEntry& e : flow.c_stick_schedule) {
    if (!(e.value >= 0.0 && e.value < 1.0)) {
      throw Error(ErrorCode::kInvalidFlowConfig,
                  "scheduled c_stick must lie in [0, 1)", "c_stick_schedule");
    }
  }
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kCoexistence: return "coexistence";
    case Outcome::kLoyalLack: return "loyal_lack";
    case Outcome::kUndecided: return "undecided";
  }
  return "unknown";
}

Direction zone_direction(Zone z) {
  switch (z) {
    case Zone::kZone1: return {-1, -1};
    case Zone::kZone2: return {-1, +1};
    case Zone::kZone3: return {+1, -1};
    case Zone::kBoundary13: return {0, -1};
    case Zone::kBoundary23: return {+1, +1};
    case Zone::kCoexistPoint: return {0, 0};
  }
  return {0, 0};
}

Direction direction(const MiningState& state, const GameConfig& config,
                    double tol) {
  return zone_direction(zone_of(state, config, tol));
}

MiningState step_flow(const MiningState& state, const GameParams& params,
                      double c_stick, double rate, double tol) {
  const Zone z1 = flow_zone(state, params, tol);
  const Direction d1 = zone_direction(z1);
  const MiningState n1 = move(state, d1, rate, c_stick);
  const int e1f = sgn(n1.r_f - state.r_f);
  const int e1b = sgn(n1.r_b - state.r_b);
  if (e1f == 0 && e1b == 0) return state;

  const Zone z2 = flow_zone(n1, params, tol);
  const Direction d2 = zone_direction(z2);
  const MiningState n2 = move(n1, d2, rate, c_stick);
  const int e2f = sgn(n2.r_f - n1.r_f);
  const int e2b = sgn(n2.r_b - n1.r_b);
  if (e1f * e2f >= 0 && e1b * e2b >= 0) return n1;
  return move(state, resolve_chatter(z1, z2, d1, d2), rate, c_stick);
}

MiningState step_flow(const MiningState& state, const FlowConfig& flow,
                      const GameConfig& config) {
  check_state(state);
  return step_flow(lift_to(state, config.c_stick()), config.params(),
                   config.c_stick(), flow.migration_rate, flow.zone_tol);
}

EquilibriumSet equilibria(const GameParams& params, double c_stick) {
  RawGameConfig raw{params.k, static_cast<std::int64_t>(params.n_in),
                    static_cast<std::int64_t>(params.n_de), c_stick,
                    {1.0 - c_stick}};
  return equilibria(validate_config(raw));
}

Outcome classify_outcome(const MiningState& state, const EquilibriumSet& eq,
                         double eps) {
  const double dc = eq.distance_to_coexist(state);
  const double dl = eq.distance_to_lack(state);
  if (dc <= eps && dc <= dl) return Outcome::kCoexistence;
  if (dl <= eps) return Outcome::kLoyalLack;
  if (dc <= eps) return Outcome::kCoexistence;
  return Outcome::kUndecided;
}

Trajectory simulate_flow(const MiningState& initial, const FlowConfig& flow,
                         const GameConfig& config) {
  validate_flow(flow);
  check_state(initial);
  GameParams params = config.params();
  const double base_k = params.k;
  const double base_c = config.c_stick();
  const double settle_at =
      std::max(last_change(flow.k_schedule), last_change(flow.c_stick_schedule));

  Trajectory traj;
  auto record = [&](std::int64_t step, const MiningState& s, double c) {
    traj.steps.push_back(step);
    traj.states.push_back(s);
    traj.zones.push_back(flow_zone(s, params, flow.zone_tol));
    traj.k.push_back(params.k);
    traj.c_stick.push_back(c);
  };

  std::int64_t t = 0;
  params.k = schedule_value(flow.k_schedule, 0.0, base_k);
  double c = schedule_value(flow.c_stick_schedule, 0.0, base_c);
  MiningState cur = lift_to(initial, c);
  MiningState prev{-1.0, -1.0};
  record(0, cur, c);

  while (t < flow.max_steps) {
    const MiningState next =
        step_flow(cur, params, c, flow.migration_rate, flow.zone_tol);
    const bool fixed = near(next, cur);
    const bool cycle = near(next, prev);
    if ((fixed || cycle) && static_cast<double>(t) >= settle_at) break;

    if (fixed) {
      // Nothing moves until the next schedule change.
      const double jump = next_change(flow.k_schedule, flow.c_stick_schedule,
                                      static_cast<double>(t));
      t = std::min<std::int64_t>(flow.max_steps,
                                 static_cast<std::int64_t>(std::ceil(jump)));
    } else {
      prev = cur;
      cur = next;
      ++t;
    }
    const double new_k =
        schedule_value(flow.k_schedule, static_cast<double>(t), base_k);
    const double new_c =
        schedule_value(flow.c_stick_schedule, static_cast<double>(t), base_c);
    if (new_k != params.k || new_c != c) {
      params.k = new_k;
      c = new_c;
      cur = lift_to(cur, c);
      prev = {-1.0, -1.0};
    }
    if (flow.record_states) record(t, cur, c);
  }
  if (!flow.record_states) record(t, cur, c);

  traj.steps_used = t;
  traj.outcome = classify_outcome(cur, equilibria(params, c),
                                  flow.convergence_eps);
  return traj;
}

MiningState state_of(const Assignment& assignment, const GameConfig& config) {
  if (assignment.size() != config.powers().size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "assignment size does not match the number of players",
                "assignment");
  }
  MiningState s{0.0, config.c_stick()};
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    switch (assignment[i]) {
      case Strategy::kFickle: s.r_f += config.powers()[i]; break;
      case Strategy::kBOnly: s.r_b += config.powers()[i]; break;
      case Strategy::kAOnly: break;
      case Strategy::kAutomatic:
        throw Error(ErrorCode::kAutomaticNotAnalytic,
                    "automatic mining has no analytic payoff", "assignment");
    }
  }
  s.r_f = std::min(s.r_f, 1.0);
  s.r_b = std::min(s.r_b, 1.0 - s.r_f);
  return s;
}

double max_deviation_gain(const Assignment& assignment,
                          const GameConfig& config) {
  const MiningState s = state_of(assignment, config);
  double gain = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    gain = std::max(gain, finite_deviation(s, config.powers()[i],
                                           assignment[i], config)
                              .payoff_gain);
  }
  return gain;
}

Assignment step_best_response(const Assignment& assignment,
                              const GameConfig& config, Rng& rng) {
  const MiningState s = state_of(assignment, config);
  Assignment out = assignment;
  if (out.empty()) return out;
  const std::size_t i = rng.below(out.size());
  out[i] = finite_deviation(s, config.powers()[i], out[i], config)
               .best_strategy;
  return out;
}

Assignment step_best_response(const Assignment& assignment,
                              const GameConfig& config, RngSeed seed) {
  Rng rng(seed);
  return step_best_response(assignment, config, rng);
}

BestResponseRun run_best_response(const Assignment& initial,
                                  const GameConfig& config, RngSeed seed,
                                  std::int64_t max_steps, double gain_tol) {
  Rng rng(seed);
  BestResponseRun run;
  run.final_assignment = initial;
  run.states.push_back(state_of(initial, config));
  while (true) {
    if (max_deviation_gain(run.final_assignment, config) <= gain_tol) {
      run.converged = true;
      break;
    }
    if (run.steps >= max_steps) break;
    run.final_assignment = step_best_response(run.final_assignment, config, rng);
    ++run.steps;
    run.states.push_back(state_of(run.final_assignment, config));
  }
  return run;
}

double automatic_threshold(const GameConfig& config) { return config.k(); }

}  // namespace dualchain

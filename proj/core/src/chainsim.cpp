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

#include "dualchain/chainsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace dualchain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAutoTieSlack = 1e-12;

[[noreturn]] void bad_regime(const std::string& msg) {
  throw Error(ErrorCode::kInvalidRegime, msg, "regime");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    bad_regime("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  // std::from_chars for double is not available in every libstdc++ we
  // target, so go through strtod on a bounded copy.
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    bad_regime("expected a number, got '" + copy + "'");
  }
  return v;
}

struct Chain {
  Coin coin = Coin::kA;
  DifficultyRegime regime;
  double d = 1.0;
  double p = 0.0;
  double work = 1.0;
  double t_last = 0.0;
  std::int64_t height = 0;
  double anchor_t = 0.0;
  std::int64_t anchor_h = 0;
  // PerBlockWindow: (time, difficulty mined at) of recent blocks, oldest
  // first. The first entry is the reference point and its difficulty is not
  // part of `window_sum`.
  std::deque<std::pair<double, double>> window;
  double window_sum = 0.0;
  // EpochWithEda: times of the anchor and the blocks after it, at most
  // eda_window + 1 entries.
  std::deque<double> eda_times;
  double last_block_t = 0.0;
  ChainStats stats;

  void advance(double t) {
    if (p > 0.0) work -= (t - t_last) * p / d;
    work = std::max(work, 0.0);
    t_last = t;
  }

  double next_block() const {
    if (!(p > 0.0)) return kInf;
    return t_last + work * d / p;
  }

  void reset_anchor(double t) {
    anchor_t = t;
    anchor_h = height;
    eda_times.clear();
    eda_times.push_back(t);
  }

  // Applies the regime after a block found at time t under difficulty
  // `mined_at`. Returns true when the difficulty changed.
  bool retarget(double t, double mined_at) {
    const double old = d;
    if (const auto* e = std::get_if<EpochFixed>(&regime)) {
      if (height - anchor_h >= e->n) {
        const double span = t - anchor_t;
        if (span > 0.0) d = d * static_cast<double>(height - anchor_h) / span;
        reset_anchor(t);
      }
    } else if (const auto* e = std::get_if<EpochWithEda>(&regime)) {
      eda_times.push_back(t);
      while (static_cast<std::int64_t>(eda_times.size()) > e->eda_window + 1) {
        eda_times.pop_front();
      }
      if (height - anchor_h >= e->n) {
        const double span = t - anchor_t;
        if (span > 0.0) d = d * static_cast<double>(height - anchor_h) / span;
        reset_anchor(t);
      } else if (height - anchor_h >= e->eda_window &&
                 eda_times.back() - eda_times.front() > e->eda_threshold) {
        d *= e->eda_factor;
        reset_anchor(t);
      }
    } else {
      const auto& w = std::get<PerBlockWindow>(regime);
      window.emplace_back(t, mined_at);
      window_sum += mined_at;
      while (static_cast<std::int64_t>(window.size()) > w.window + 1) {
        window.pop_front();
        window_sum -= window.front().second;
      }
      // Recompute occasionally to keep the running sum from drifting.
      if (height % 4096 == 0) {
        window_sum = 0.0;
        for (std::size_t i = 1; i < window.size(); ++i) {
          window_sum += window[i].second;
        }
      }
      const double span = t - window.front().first;
      if (span > 0.0) {
        const double target = window_sum / span;
        d = std::clamp(target, 0.5 * old, 2.0 * old);
      }
    }
    return d != old;
  }
};

struct AgentRt {
  double power = 0.0;
  Strategy policy = Strategy::kAOnly;
  Coin coin = Coin::kA;
  double snap = 0.0;
  double reward = 0.0;
  bool faction = false;
  bool revising = false;
};

class Simulation {
 public:
  Simulation(const ChainWorld& world, const std::vector<MinerAgent>& agents,
             const DifficultyRegime& regime_a,
             const DifficultyRegime& regime_b, const SimOptions& options,
             RngSeed seed)
      : world_(world), opt_(options), rng_(seed) {
    chains_[0].coin = Coin::kA;
    chains_[0].regime = regime_a;
    chains_[1].coin = Coin::kB;
    chains_[1].regime = regime_b;
    report_.duration = options.duration;
    report_.warmup = options.warmup;
    for (const MinerAgent& a : agents) {
      AgentRt rt;
      rt.power = a.power;
      rt.policy = a.policy;
      rt.faction = a.faction;
      rt.revising = a.revising && !a.faction;
      rt_.push_back(rt);
      report_.agents.push_back({a.id, a.power, a.policy, a.policy, 0.0});
    }
  }

  SimReport run() {
    k_ = schedule_value(world_.k_schedule, 0.0, world_.k);
    recompute_policy_power();
    report_.has_fickle = policy_power(Strategy::kFickle) > 0.0;

    const double r_b = policy_power(Strategy::kBOnly);
    chain(Coin::kA).d = world_.difficulty_a > 0.0 ? world_.difficulty_a
                                                   : std::max(1.0 - r_b, 0.0);
    chain(Coin::kB).d = world_.difficulty_b > 0.0 ? world_.difficulty_b
                        : r_b > 0.0               ? r_b
                                                  : 1.0;
    if (!(chain(Coin::kA).d > 0.0)) chain(Coin::kA).d = 1.0;

    fickle_coin_ = fickle_wants_b() ? Coin::kB : Coin::kA;
    auto_coin_ = auto_choice(Coin::kA);
    for (AgentRt& a : rt_) a.coin = coin_for(a.policy);
    recompute_allocation();
    if (!(chain(Coin::kA).p > 0.0)) {
      throw Error(ErrorCode::kZeroPowerChain,
                  "chain A has no mining power at start, so its difficulty "
                  "can never adjust",
                  "agents");
    }
    for (Chain& c : chains_) {
      c.work = draw_work();
      c.reset_anchor(0.0);
      c.window.emplace_back(0.0, 0.0);
      if (opt_.record_difficulty_history) {
        c.stats.difficulty_history.emplace_back(0.0, c.d);
      }
    }
    for (int p = 0; p < static_cast<int>(kPolicyCount); ++p) {
      shadow_coin_[p] = coin_for(static_cast<Strategy>(p));
    }
    if (fickle_coin_ == Coin::kB && report_.has_fickle) {
      report_.fickle_phases.push_back({0.0, std::nullopt});
    }
    start_interval(0.0);

    double next_price = next_price_change(0.0);
    double next_revision =
        opt_.revision_interval > 0.0 ? opt_.revision_interval : kInf;
    double next_sample = opt_.sample_interval > 0.0 ? 0.0 : kInf;
    bool warmup_pending = opt_.warmup > 0.0;

    double t = 0.0;
    while (true) {
      const double ta = chain(Coin::kA).next_block();
      const double tb = chain(Coin::kB).next_block();
      const double tw = warmup_pending ? opt_.warmup : kInf;
      const double tmin =
          std::min({ta, tb, next_price, next_revision, next_sample, tw,
                    opt_.duration});
      integrate(t, tmin);
      t = tmin;
      if (t == next_sample && t < opt_.duration) {
        take_sample(t);
        next_sample += opt_.sample_interval;
      } else if (t == tw) {
        begin_accounting();
        warmup_pending = false;
      } else if (t == next_price && t < opt_.duration) {
        price_tick(t);
        next_price = next_price_change(t);
      } else if (t >= opt_.duration) {
        break;
      } else if (t == ta) {
        block(Coin::kA, t);
      } else if (t == tb) {
        block(Coin::kB, t);
      } else if (t == next_revision) {
        revise(t);
        next_revision += opt_.revision_interval;
      }
    }
    finish(opt_.duration);
    return std::move(report_);
  }

 private:
  Chain& chain(Coin c) { return chains_[static_cast<int>(c)]; }

  double draw_work() { return opt_.deterministic ? 1.0 : rng_.exponential(); }

  double policy_power(Strategy s) const {
    return policy_power_[policy_index(s)];
  }

  void recompute_policy_power() {
    policy_power_.fill(0.0);
    for (const AgentRt& a : rt_) policy_power_[policy_index(a.policy)] += a.power;
  }

  Coin coin_for(Strategy s) const {
    switch (s) {
      case Strategy::kAOnly: return Coin::kA;
      case Strategy::kBOnly: return Coin::kB;
      case Strategy::kFickle: return fickle_coin_;
      case Strategy::kAutomatic: return auto_coin_;
    }
    return Coin::kA;
  }

  // Definition of fickle mining: move to B when its difficulty is below
  // both the B-side power after the move and k times A's difficulty, or at
  // most the loyal B power; otherwise mine A.
  bool fickle_wants_b() const {
    const double r_f = policy_power(Strategy::kFickle);
    const double r_b = policy_power(Strategy::kBOnly);
    const double d_b = chains_[1].d;
    const double bound = std::min(r_f + r_b, k_ * chains_[0].d);
    return d_b < bound * (1.0 - opt_.switch_slack) ||
           d_b <= r_b * (1.0 + opt_.switch_slack);
  }

  Coin auto_choice(Coin current) const {
    const double va = 1.0 / chains_[0].d;
    const double vb = k_ / chains_[1].d;
    if (vb > va * (1.0 + kAutoTieSlack)) return Coin::kB;
    if (va > vb * (1.0 + kAutoTieSlack)) return Coin::kA;
    return current;
  }

  void recompute_allocation() {
    double pa = 0.0;
    double pb = 0.0;
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      const double v = policy_power_[p];
      if (coin_for(static_cast<Strategy>(p)) == Coin::kB) {
        pb += v;
      } else {
        pa += v;
      }
    }
    chain(Coin::kA).p = pa;
    chain(Coin::kB).p = pb;
  }

  void settle(AgentRt& a) {
    const double earned = a.power * (index_[static_cast<int>(a.coin)] - a.snap);
    a.reward += earned;
    policy_reward_[policy_index(a.policy)] += earned;
    a.snap = index_[static_cast<int>(a.coin)];
  }

  double shadow_read(std::size_t p) const {
    return shadow_acc_[p] + index_[static_cast<int>(shadow_coin_[p])] -
           shadow_snap_[p];
  }

  void shadow_move(std::size_t p, Coin to) {
    if (shadow_coin_[p] == to) return;
    shadow_acc_[p] = shadow_read(p);
    shadow_coin_[p] = to;
    shadow_snap_[p] = index_[static_cast<int>(to)];
  }

  void start_interval(double t) {
    interval_t0_ = t;
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      interval_start_[p] = shadow_read(p);
    }
  }

  void integrate(double t0, double t1) {
    if (t0 < opt_.warmup || t1 <= t0) return;
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      policy_power_time_[p] += policy_power_[p] * (t1 - t0);
    }
  }

  void advance_all(double t) {
    for (Chain& c : chains_) c.advance(t);
  }

  double switcher_power_on_b() const {
    double v = 0.0;
    if (fickle_coin_ == Coin::kB) v += policy_power(Strategy::kFickle);
    if (auto_coin_ == Coin::kB) v += policy_power(Strategy::kAutomatic);
    return v;
  }

  void log(double t, Coin chain_id, EventType type) {
    if (!opt_.record_events) return;
    report_.events.push_back({t, chain_id, type, chains_[0].d, chains_[1].d,
                              switcher_power_on_b(),
                              policy_power(Strategy::kBOnly)});
  }

  // Moves every agent of `policy` to `to`.
  void move_group(Strategy policy, Coin to) {
    for (AgentRt& a : rt_) {
      if (a.policy == policy && a.coin != to) {
        settle(a);
        a.coin = to;
        a.snap = index_[static_cast<int>(to)];
      }
    }
  }

  // Re-runs the switching rules and applies the resulting moves.
  void reevaluate(double t, bool fickle_trigger) {
    const Coin new_fickle =
        fickle_trigger ? (fickle_wants_b() ? Coin::kB : Coin::kA) : fickle_coin_;
    const Coin new_auto = auto_choice(auto_coin_);
    if (new_fickle == fickle_coin_ && new_auto == auto_coin_) return;
    advance_all(t);
    if (new_fickle != fickle_coin_) {
      fickle_coin_ = new_fickle;
      move_group(Strategy::kFickle, new_fickle);
      shadow_move(policy_index(Strategy::kFickle), new_fickle);
      if (report_.has_fickle) {
        if (new_fickle == Coin::kB) {
          report_.fickle_phases.push_back({t, std::nullopt});
        } else if (!report_.fickle_phases.empty() &&
                   !report_.fickle_phases.back().end) {
          report_.fickle_phases.back().end = t;
          if (report_.fickle_phases.back().start >= opt_.warmup) {
            ++report_.cycles;
          }
        }
      }
      log(t, new_fickle, EventType::kSwitch);
    }
    if (new_auto != auto_coin_) {
      auto_coin_ = new_auto;
      move_group(Strategy::kAutomatic, new_auto);
      shadow_move(policy_index(Strategy::kAutomatic), new_auto);
      log(t, new_auto, EventType::kSwitch);
    }
    recompute_allocation();
  }

  void block(Coin id, double t) {
    Chain& c = chain(id);
    c.advance(t);
    ++c.height;
    const double value = id == Coin::kA ? 1.0 : k_;
    index_[static_cast<int>(id)] += value / c.p;
    ++c.stats.blocks;
    if (t >= opt_.warmup) {
      ++c.stats.accounted_blocks;
      c.stats.accounted_value += value;
    }
    c.last_block_t = t;
    c.work = draw_work();
    log(t, id, EventType::kBlock);
    const bool changed = c.retarget(t, c.d);
    if (changed) {
      if (opt_.record_difficulty_history) {
        c.stats.difficulty_history.emplace_back(t, c.d);
      }
      log(t, id, EventType::kDifficulty);
    }
    reevaluate(t, changed);
  }

  void price_tick(double t) {
    k_ = schedule_value(world_.k_schedule, t, world_.k);
    log(t, Coin::kB, EventType::kPrice);
    reevaluate(t, true);
  }

  double next_price_change(double t) const {
    for (const ScheduleEntry& e : world_.k_schedule) {
      if (e.at > t) return e.at;
    }
    return kInf;
  }

  void revise(double t) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < rt_.size(); ++i) {
      if (rt_[i].revising) pool.push_back(i);
    }
    const double len = t - interval_t0_;
    if (!pool.empty() && len > 0.0 && !opt_.revision_candidates.empty()) {
      AgentRt& a = rt_[pool[rng_.below(pool.size())]];
      Strategy best = a.policy;
      double best_v = -kInf;
      for (Strategy s : opt_.revision_candidates) {
        const std::size_t p = policy_index(s);
        const double v = (shadow_read(p) - interval_start_[p]) / len;
        if (v > best_v || (v == best_v && s == a.policy)) {
          best_v = v;
          best = s;
        }
      }
      if (best != a.policy) {
        advance_all(t);
        settle(a);
        a.policy = best;
        recompute_policy_power();
        a.coin = coin_for(best);
        a.snap = index_[static_cast<int>(a.coin)];
        recompute_allocation();
        log(t, a.coin, EventType::kRevision);
        reevaluate(t, false);
      }
    }
    start_interval(t);
  }

  void take_sample(double t) {
    report_.samples.push_back(
        {t, chains_[0].p, chains_[1].p, chains_[0].d, chains_[1].d, k_,
         policy_power(Strategy::kFickle), policy_power(Strategy::kBOnly),
         fickle_coin_ == Coin::kB});
  }

  void begin_accounting() {
    for (AgentRt& a : rt_) {
      settle(a);
      a.reward = 0.0;
    }
    policy_reward_.fill(0.0);
    policy_power_time_.fill(0.0);
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      shadow_warm_[p] = shadow_read(p);
    }
  }

  void finish(double t) {
    for (std::size_t i = 0; i < rt_.size(); ++i) {
      settle(rt_[i]);
      report_.agents[i].reward = rt_[i].reward;
      report_.agents[i].final_policy = rt_[i].policy;
    }
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      report_.policies[p].reward = policy_reward_[p];
      report_.policies[p].power_time = policy_power_time_[p];
      const double span = t - opt_.warmup;
      report_.shadow_density[p] =
          span > 0.0 ? (shadow_read(p) - shadow_warm_[p]) / span : 0.0;
    }
    for (Chain& c : chains_) {
      c.stats.mean_interval =
          c.stats.blocks > 0 ? c.last_block_t / static_cast<double>(c.stats.blocks)
                             : 0.0;
    }
    report_.chain_a = std::move(chains_[0].stats);
    report_.chain_b = std::move(chains_[1].stats);
  }

  const ChainWorld& world_;
  const SimOptions& opt_;
  Rng rng_;
  SimReport report_;
  std::array<Chain, 2> chains_;
  std::vector<AgentRt> rt_;
  double k_ = 1.0;
  std::array<double, 2> index_{0.0, 0.0};
  std::array<double, kPolicyCount> policy_power_{};
  std::array<double, kPolicyCount> policy_reward_{};
  std::array<double, kPolicyCount> policy_power_time_{};
  Coin fickle_coin_ = Coin::kA;
  Coin auto_coin_ = Coin::kA;
  std::array<Coin, kPolicyCount> shadow_coin_{};
  std::array<double, kPolicyCount> shadow_acc_{};
  std::array<double, kPolicyCount> shadow_snap_{};
  std::array<double, kPolicyCount> shadow_warm_{};
  std::array<double, kPolicyCount> interval_start_{};
  double interval_t0_ = 0.0;
};

}  // namespace

void validate_regime(const DifficultyRegime& regime) {
  if (const auto* e = std::get_if<EpochFixed>(&regime)) {
    if (e->n < 1) bad_regime("epoch length must be >= 1");
  } else if (const auto* e = std::get_if<EpochWithEda>(&regime)) {
    if (e->n < 1) bad_regime("epoch length must be >= 1");
    if (e->eda_window < 1) bad_regime("eda_window must be >= 1");
    if (!(e->eda_threshold > 0.0)) bad_regime("eda_threshold must be > 0");
    if (!(e->eda_factor > 0.0 && e->eda_factor < 1.0)) {
      bad_regime("eda_factor must lie in (0, 1)");
    }
  } else if (std::get<PerBlockWindow>(regime).window < 1) {
    bad_regime("window must be >= 1");
  }
}

DifficultyRegime parse_regime(std::string_view spec) {
  const std::vector<std::string_view> parts = split(spec, ':');
  DifficultyRegime out;
  if (parts[0] == "epoch" && parts.size() == 2) {
    out = EpochFixed{parse_int(parts[1])};
  } else if (parts[0] == "eda" && parts.size() >= 2 && parts.size() <= 5) {
    EpochWithEda e;
    e.n = parse_int(parts[1]);
    if (parts.size() > 2) e.eda_window = parse_int(parts[2]);
    if (parts.size() > 3) e.eda_threshold = parse_double(parts[3]);
    if (parts.size() > 4) e.eda_factor = parse_double(parts[4]);
    out = e;
  } else if (parts[0] == "window" && parts.size() == 2) {
    out = PerBlockWindow{parse_int(parts[1])};
  } else {
    bad_regime("unrecognized regime '" + std::string(spec) +
               "'; expected epoch:N, eda:N[:W:T:F] or window:W");
  }
  validate_regime(out);
  return out;
}

std::string regime_to_string(const DifficultyRegime& regime) {
  std::ostringstream out;
  if (const auto* e = std::get_if<EpochFixed>(&regime)) {
    out << "epoch:" << e->n;
  } else if (const auto* e = std::get_if<EpochWithEda>(&regime)) {
    out << "eda:" << e->n << ':' << e->eda_window << ':' << e->eda_threshold
        << ':' << e->eda_factor;
  } else {
    out << "window:" << std::get<PerBlockWindow>(regime).window;
  }
  return out.str();
}

void validate_roster(const std::vector<MinerAgent>& agents) {
  if (agents.empty()) {
    throw Error(ErrorCode::kInvalidRoster, "roster is empty", "agents");
  }
  double sum = 0.0;
  for (const MinerAgent& a : agents) {
    if (!(a.power > 0.0) || !std::isfinite(a.power)) {
      throw Error(ErrorCode::kInvalidRoster,
                  "agent '" + a.id + "' must have positive power", "agents");
    }
    if (a.faction && a.policy != Strategy::kBOnly) {
      throw Error(ErrorCode::kInvalidRoster,
                  "faction agent '" + a.id + "' must use the b_only policy",
                  "agents");
    }
    sum += a.power;
  }
  if (std::abs(sum - 1.0) > kPowerSumTolerance) {
    std::ostringstream msg;
    msg << "agent powers sum to " << sum << ", expected 1";
    throw Error(ErrorCode::kInvalidRoster, msg.str(), "agents");
  }
}

std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::kBlock: return "block";
    case EventType::kDifficulty: return "difficulty";
    case EventType::kPrice: return "price";
    case EventType::kSwitch: return "switch";
    case EventType::kRevision: return "revision";
  }
  return "unknown";
}

std::optional<double> PolicyStats::density() const {
  if (!(power_time > 0.0)) return std::nullopt;
  return reward / power_time;
}

SimReport run(const ChainWorld& world, const std::vector<MinerAgent>& agents,
              const DifficultyRegime& regime_a,
              const DifficultyRegime& regime_b, const SimOptions& options,
              RngSeed seed) {
  validate_roster(agents);
  validate_regime(regime_a);
  validate_regime(regime_b);
  if (!(options.duration > 0.0) || !std::isfinite(options.duration)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be positive",
                "duration");
  }
  if (!(options.warmup >= 0.0 && options.warmup < options.duration)) {
    throw Error(ErrorCode::kInvalidArgument,
                "warmup must lie in [0, duration)", "warmup");
  }
  if (!(options.sample_interval >= 0.0) ||
      !(options.revision_interval >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample and revision intervals must be >= 0", "options");
  }
  if (!(world.k > 0.0 && world.k <= 1.0)) {
    throw Error(ErrorCode::kKAboveOne, "k must lie in (0, 1]", "k");
  }
  check_schedule(world.k_schedule, "k_schedule");
  for (const ScheduleEntry& e : world.k_schedule) {
    if (!(e.value > 0.0 && e.value <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scheduled k must lie in (0, 1]", "k_schedule");
    }
  }
  Simulation sim(world, agents, regime_a, regime_b, options, seed);
  return sim.run();
}

PolicyDensities empirical_payoffs(const SimReport& report) {
  if (report.has_fickle && report.cycles < kMinFickleCycles) {
    std::ostringstream msg;
    msg << "only " << report.cycles << " fickle cycles completed, need "
        << kMinFickleCycles;
    throw Error(ErrorCode::kInsufficientCycles, msg.str(), "duration");
  }
  PolicyDensities out;
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    out.density[p] = report.policies[p].density();
  }
  return out;
}

double eda_expected_nde(const MiningState& state, const EpochWithEda& regime,
                        RngSeed seed, int trials) {
  validate_regime(regime);
  check_state(state);
  if (!(state.r_b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "r_b must be positive", "state");
  }
  if (trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1", "trials");
  }
  Rng rng(seed);
  const double mean_interval = (state.r_f + state.r_b) / state.r_b;
  const std::size_t w = static_cast<std::size_t>(regime.eda_window);
  std::vector<double> times(w + 1, 0.0);
  double total = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    // Ring buffer of the last w + 1 block times; slot 0 holds the anchor.
    double t = 0.0;
    std::int64_t h = 0;
    times[0] = 0.0;
    while (h < regime.n) {
      t += rng.exponential() * mean_interval;
      ++h;
      times[static_cast<std::size_t>(h) % (w + 1)] = t;
      if (h >= regime.eda_window &&
          t - times[static_cast<std::size_t>(h - regime.eda_window) % (w + 1)] >
              regime.eda_threshold) {
        break;
      }
    }
    total += static_cast<double>(h);
  }
  return total / trials;
}

}  // namespace dualchain

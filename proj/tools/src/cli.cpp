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

#include "dualchain/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "dualchain/dualchain.hpp"

namespace dualchain::cli {
namespace {

using json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  bool quiet = false;
  double tol = kZoneTolerance;
};

struct Context {
  Globals globals;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::shared_ptr<spdlog::logger> log;
};

std::string num(double v) { return fmt::format("{}", v); }

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string opt_csv(const std::optional<double>& v) {
  return v ? num(*v) : std::string();
}

json state_json(const MiningState& s) {
  return json{{"r_f", s.r_f}, {"r_b", s.r_b}};
}

std::string read_file(const std::string& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path, field);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text,
                const std::string& field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path, field);
  f << text;
  if (!f) throw Error(ErrorCode::kIoError, "write failed: " + path, field);
}

double parse_double(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParseError, "not a number: '" + text + "'", field);
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

double number_field(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kParseError, "missing field " + key, key);
  }
  if (!j[key].is_number()) {
    throw Error(ErrorCode::kParseError, key + " must be a number", key);
  }
  return j[key].get<double>();
}

std::int64_t integer_field(const json& j, const std::string& key) {
  const double v = number_field(j, key);
  if (v != std::floor(v) || std::abs(v) > 9e15) {
    throw Error(ErrorCode::kParseError, key + " must be an integer", key);
  }
  return static_cast<std::int64_t>(v);
}

json config_json(const GameConfig& c) {
  return json{{"k", c.k()},
              {"n_in", c.n_in()},
              {"n_de", c.n_de()},
              {"c_stick", c.c_stick()},
              {"powers", c.powers()}};
}

json policy_map(const std::array<double, kPolicyCount>& v) {
  json j = json::object();
  for (auto s : {Strategy::kFickle, Strategy::kAOnly, Strategy::kBOnly,
                 Strategy::kAutomatic}) {
    j[std::string(strategy_name(s))] = v[policy_index(s)];
  }
  return j;
}

// Picks the output format: explicit --format, else the --out extension,
// else the subcommand default.
std::string resolve_format(const Globals& g, const std::string& fallback,
                           bool csv_ok, bool json_ok) {
  std::string f = g.format;
  if (f.empty()) {
    if (g.out.ends_with(".csv") && csv_ok) {
      f = "csv";
    } else if (g.out.ends_with(".json") && json_ok) {
      f = "json";
    } else {
      f = fallback;
    }
  }
  if ((f == "csv" && !csv_ok) || (f == "json" && !json_ok)) {
    throw Error(ErrorCode::kInvalidArgument,
                "format " + f + " is not offered by this subcommand",
                "--format");
  }
  return f;
}

void emit(const Context& ctx, const std::string& text) {
  if (ctx.globals.out.empty()) {
    *ctx.out << text;
    ctx.out->flush();
  } else {
    write_file(ctx.globals.out, text, "--out");
  }
}

void echo(const Context& ctx, const std::string& command,
          const std::string& format, json resolved) {
  if (ctx.globals.quiet) return;
  json j{{"command", command},
         {"seed", ctx.globals.seed},
         {"format", format},
         {"out", ctx.globals.out.empty() ? json(nullptr)
                                         : json(ctx.globals.out)},
         {"zone_tol", ctx.globals.tol}};
  for (auto& [key, value] : resolved.items()) j[key] = value;
  *ctx.err << j.dump() << '\n';
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("dualchain", sink);
  logger->set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("DUALCHAIN_LOG")) {
    const std::string v = env;
    if (v == "error" || v == "warn" || v == "info" || v == "debug") {
      level = spdlog::level::from_str(v);
    }
  }
  logger->set_level(level);
  return logger;
}

void write_error(std::ostream& err, std::string_view code,
                 const std::string& message, const std::string& field) {
  json j{{"code", code}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  err << j.dump() << '\n';
}

// ---- payoff ----

struct PayoffOpts {
  std::string config;
  std::string state;
  bool renormalize = false;
};

void cmd_payoff(const Context& ctx, const PayoffOpts& o) {
  const auto format = resolve_format(ctx.globals, "json", true, true);
  const auto config = load_config(o.config, o.renormalize);
  const auto state = parse_state(o.state, "--state");
  echo(ctx, "payoff", format,
       {{"config", config_json(config)}, {"state", state_json(state)}});
  const auto t = payoff_triple(state, config);
  if (format == "json") {
    json j{{"r_f", state.r_f},
           {"r_b", state.r_b},
           {"u_f", opt_json(t.u_f)},
           {"u_a", opt_json(t.u_a)},
           {"u_b", opt_json(t.u_b)}};
    emit(ctx, j.dump(2) + "\n");
  } else {
    emit(ctx, fmt::format("r_f,r_b,u_f,u_a,u_b\n{},{},{},{},{}\n",
                          num(state.r_f), num(state.r_b), opt_csv(t.u_f),
                          opt_csv(t.u_a), opt_csv(t.u_b)));
  }
}

// ---- zones ----

struct ZonesOpts {
  std::string config;
  int grid = 50;
  bool renormalize = false;
};

void cmd_zones(const Context& ctx, const ZonesOpts& o) {
  const auto format = resolve_format(ctx.globals, "csv", true, true);
  if (o.grid < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid must be >= 1", "--grid");
  }
  const auto config = load_config(o.config, o.renormalize);
  echo(ctx, "zones", format,
       {{"config", config_json(config)}, {"grid", o.grid}});

  // Cell centres of an N x N grid over the simplex: r_f uniform on (0, 1),
  // r_b uniform on (0, 1 - r_f).
  const double n = o.grid;
  std::string csv = "r_f,r_b,zone\n";
  json rows = json::array();
  for (int i = 0; i < o.grid; ++i) {
    const double rf = (i + 0.5) / n;
    for (int j = 0; j < o.grid; ++j) {
      const double rb = (1.0 - rf) * (j + 0.5) / n;
      const auto z = zone_name(zone_of({rf, rb}, config.params(),
                                       ctx.globals.tol));
      if (format == "csv") {
        csv += fmt::format("{},{},{}\n", num(rf), num(rb), z);
      } else {
        rows.push_back({{"r_f", rf}, {"r_b", rb}, {"zone", z}});
      }
    }
  }
  emit(ctx, format == "csv" ? csv : rows.dump(2) + "\n");
}

// ---- equilibria ----

struct ConfigOpts {
  std::string config;
  bool renormalize = false;
};

json equilibria_json(const EquilibriumSet& eq) {
  json j{{"case_tag", eq.case_tag},
         {"alpha", eq.alpha},
         {"beta", opt_json(eq.beta)},
         {"coexist_point",
          eq.coexist_point ? state_json(*eq.coexist_point) : json(nullptr)}};
  if (const auto* seg = std::get_if<LackSegment>(&eq.lack)) {
    j["lack"] = {{"kind", "segment"},
                 {"r_f_min", seg->r_f_min},
                 {"r_f_max", seg->r_f_max},
                 {"r_b", seg->r_b}};
  } else {
    const auto& p = std::get<MiningState>(eq.lack);
    j["lack"] = {{"kind", "point"}, {"r_f", p.r_f}, {"r_b", p.r_b}};
  }
  return j;
}

void cmd_equilibria(const Context& ctx, const ConfigOpts& o) {
  const auto format = resolve_format(ctx.globals, "json", false, true);
  const auto config = load_config(o.config, o.renormalize);
  echo(ctx, "equilibria", format, {{"config", config_json(config)}});
  emit(ctx, equilibria_json(equilibria(config)).dump(2) + "\n");
}

// ---- threshold ----

void cmd_threshold(const Context& ctx, const ConfigOpts& o) {
  const auto format = resolve_format(ctx.globals, "json", true, true);
  const auto config = load_config(o.config, o.renormalize);
  echo(ctx, "threshold", format, {{"config", config_json(config)}});
  const double t = automatic_threshold(config);
  if (format == "json") {
    emit(ctx, json{{"automatic_threshold", t}}.dump(2) + "\n");
  } else {
    emit(ctx, fmt::format("automatic_threshold\n{}\n", num(t)));
  }
}

// ---- simulate ----

struct SimulateOpts {
  std::string config;
  std::string initial;
  std::string k_schedule;
  std::string c_stick_schedule;
  double rate = 0.001;
  std::int64_t max_steps = 1'000'000;
  double eps = 0.005;
  bool renormalize = false;
};

json schedule_json(const Schedule& s) {
  json j = json::array();
  for (const auto& e : s) j.push_back({{"at", e.at}, {"value", e.value}});
  return j;
}

void cmd_simulate(const Context& ctx, const SimulateOpts& o) {
  const auto format = resolve_format(ctx.globals, "csv", true, true);
  const auto config = load_config(o.config, o.renormalize);
  const auto initial = parse_state(o.initial, "--initial");
  FlowConfig flow;
  flow.migration_rate = o.rate;
  flow.max_steps = o.max_steps;
  flow.convergence_eps = o.eps;
  flow.zone_tol = ctx.globals.tol;
  if (!o.k_schedule.empty()) {
    flow.k_schedule = load_schedule(o.k_schedule, "--k-schedule");
  }
  if (!o.c_stick_schedule.empty()) {
    flow.c_stick_schedule =
        load_schedule(o.c_stick_schedule, "--c-stick-schedule");
  }
  validate_flow(flow);
  echo(ctx, "simulate", format,
       {{"config", config_json(config)},
        {"initial", state_json(initial)},
        {"migration_rate", flow.migration_rate},
        {"max_steps", flow.max_steps},
        {"convergence_eps", flow.convergence_eps},
        {"k_schedule", schedule_json(flow.k_schedule)},
        {"c_stick_schedule", schedule_json(flow.c_stick_schedule)}});

  const auto traj = simulate_flow(initial, flow, config);
  ctx.log->info("outcome {} after {} steps", outcome_name(traj.outcome),
                traj.steps_used);
  if (format == "csv") {
    std::string csv = "step,r_f,r_b,zone,k,c_stick\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      csv += fmt::format("{},{},{},{},{},{}\n", traj.steps[i],
                         num(traj.states[i].r_f), num(traj.states[i].r_b),
                         zone_name(traj.zones[i]), num(traj.k[i]),
                         num(traj.c_stick[i]));
    }
    emit(ctx, csv);
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      rows.push_back({{"step", traj.steps[i]},
                      {"r_f", traj.states[i].r_f},
                      {"r_b", traj.states[i].r_b},
                      {"zone", zone_name(traj.zones[i])},
                      {"k", traj.k[i]},
                      {"c_stick", traj.c_stick[i]}});
    }
    json j{{"outcome", outcome_name(traj.outcome)},
           {"steps_used", traj.steps_used},
           {"trajectory", rows}};
    emit(ctx, j.dump(2) + "\n");
  }
}

// ---- best-response ----

struct BestResponseOpts {
  std::string config;
  std::string assignment;
  std::int64_t max_steps = 100'000;
  double gain_tol = 1e-12;
  bool renormalize = false;
};

Assignment parse_assignment(const std::string& text, std::size_t players) {
  if (text.empty()) return Assignment(players, Strategy::kAOnly);
  Assignment a;
  for (const auto& part : split(text, ',')) {
    const auto s = parse_strategy(trim(part));
    if (!s || *s == Strategy::kAutomatic) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown strategy '" + part + "'", "--assignment");
    }
    a.push_back(*s);
  }
  if (a.size() != players) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("assignment has {} entries, config has {} players",
                            a.size(), players),
                "--assignment");
  }
  return a;
}

void cmd_best_response(const Context& ctx, const BestResponseOpts& o) {
  const auto format = resolve_format(ctx.globals, "json", true, true);
  const auto config = load_config(o.config, o.renormalize);
  const auto initial = parse_assignment(o.assignment, config.powers().size());
  if (o.max_steps < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max-steps must be >= 0",
                "--max-steps");
  }
  json names = json::array();
  for (auto s : initial) names.push_back(strategy_name(s));
  echo(ctx, "best-response", format,
       {{"config", config_json(config)},
        {"assignment", names},
        {"max_steps", o.max_steps},
        {"gain_tol", o.gain_tol}});

  const auto run = run_best_response(initial, config,
                                     RngSeed{ctx.globals.seed}, o.max_steps,
                                     o.gain_tol);
  if (format == "csv") {
    std::string csv = "step,r_f,r_b\n";
    for (std::size_t i = 0; i < run.states.size(); ++i) {
      csv += fmt::format("{},{},{}\n", i, num(run.states[i].r_f),
                         num(run.states[i].r_b));
    }
    emit(ctx, csv);
  } else {
    json final_names = json::array();
    for (auto s : run.final_assignment) final_names.push_back(strategy_name(s));
    json states = json::array();
    for (std::size_t i = 0; i < run.states.size(); ++i) {
      states.push_back({{"step", i},
                        {"r_f", run.states[i].r_f},
                        {"r_b", run.states[i].r_b}});
    }
    json j{{"converged", run.converged},
           {"steps", run.steps},
           {"final_assignment", final_names},
           {"final_state", state_json(state_of(run.final_assignment, config))},
           {"states", states}};
    emit(ctx, j.dump(2) + "\n");
  }
}

// ---- chain-sim ----

struct ChainSimOpts {
  std::string config;
  std::string agents;
  std::string regime_a;
  std::string regime_b;
  double duration = 0.0;
  double warmup = 0.0;
  double sample_interval = 1.0;
  double revision_interval = 0.0;
  double difficulty_a = 0.0;
  double difficulty_b = 0.0;
  bool deterministic = false;
  bool samples = false;
  int replicas = 1;
  int threads = 0;
  std::string events;
  std::string series;
  std::string k_schedule;
  bool renormalize = false;
};

json chain_json(const ChainStats& c) {
  return json{{"blocks", c.blocks},
              {"accounted_blocks", c.accounted_blocks},
              {"accounted_value", c.accounted_value},
              {"mean_interval", c.mean_interval},
              {"final_difficulty", c.difficulty_history.empty()
                                       ? json(nullptr)
                                       : json(c.difficulty_history.back().second)},
              {"difficulty_changes", c.difficulty_history.empty()
                                         ? 0
                                         : c.difficulty_history.size() - 1}};
}

json report_json(const SimReport& r, std::uint64_t seed, bool with_samples) {
  json agents = json::array();
  for (const auto& a : r.agents) {
    agents.push_back({{"id", a.id},
                      {"power", a.power},
                      {"initial_policy", strategy_name(a.initial_policy)},
                      {"final_policy", strategy_name(a.final_policy)},
                      {"reward", a.reward}});
  }
  json policies = json::object();
  for (auto s : {Strategy::kFickle, Strategy::kAOnly, Strategy::kBOnly,
                 Strategy::kAutomatic}) {
    const auto& p = r.policies[policy_index(s)];
    policies[std::string(strategy_name(s))] = {
        {"reward", p.reward},
        {"power_time", p.power_time},
        {"density", opt_json(p.density())}};
  }
  json phases = json::array();
  for (const auto& ph : r.fickle_phases) {
    phases.push_back({{"start", ph.start}, {"end", opt_json(ph.end)}});
  }
  json j{{"seed", seed},
         {"duration", r.duration},
         {"warmup", r.warmup},
         {"agents", agents},
         {"policies", policies},
         {"shadow_density", policy_map(r.shadow_density)},
         {"chain_a", chain_json(r.chain_a)},
         {"chain_b", chain_json(r.chain_b)},
         {"has_fickle", r.has_fickle},
         {"cycles", r.cycles},
         {"fickle_phases", phases}};
  if (with_samples) {
    json samples = json::array();
    for (const auto& s : r.samples) {
      samples.push_back({{"time", s.time},
                         {"power_a", s.power_a},
                         {"power_b", s.power_b},
                         {"difficulty_a", s.difficulty_a},
                         {"difficulty_b", s.difficulty_b},
                         {"k", s.k},
                         {"r_f_policy", s.r_f_policy},
                         {"r_b_policy", s.r_b_policy},
                         {"fickle_on_b", s.fickle_on_b}});
    }
    j["samples"] = samples;
  }
  return j;
}

std::string events_csv(const SimReport& r) {
  std::string csv =
      "time,chain,event_type,difficulty_a,difficulty_b,r_f_active,"
      "r_b_active\n";
  for (const auto& e : r.events) {
    csv += fmt::format("{},{},{},{},{},{},{}\n", num(e.time),
                       e.chain == Coin::kA ? "A" : "B",
                       event_type_name(e.type), num(e.difficulty_a),
                       num(e.difficulty_b), num(e.r_f_active),
                       num(e.r_b_active));
  }
  return csv;
}

json agents_json(const std::vector<MinerAgent>& agents) {
  json j = json::array();
  for (const auto& a : agents) {
    j.push_back({{"id", a.id},
                 {"power", a.power},
                 {"policy", strategy_name(a.policy)},
                 {"faction", a.faction},
                 {"revising", a.revising}});
  }
  return j;
}

void cmd_chain_sim(const Context& ctx, const ChainSimOpts& o) {
  const auto format = resolve_format(ctx.globals, "json", false, true);
  const auto config = load_config(o.config, o.renormalize);
  const auto agents = load_agents(o.agents);
  validate_roster(agents);
  const auto regime_a = parse_regime(o.regime_a);
  const auto regime_b = parse_regime(o.regime_b);
  if (o.replicas < 1) {
    throw Error(ErrorCode::kInvalidArgument, "replicas must be >= 1",
                "--replicas");
  }
  if (o.replicas > 1 && !o.events.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--events needs a single replica", "--events");
  }
  if (o.replicas > 1 && !o.series.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--series needs a single replica", "--series");
  }

  ChainWorld world;
  world.k = config.k();
  world.difficulty_a = o.difficulty_a;
  world.difficulty_b = o.difficulty_b;
  if (!o.k_schedule.empty()) {
    world.k_schedule = load_schedule(o.k_schedule, "--k-schedule");
  }
  SimOptions opts;
  opts.duration = o.duration;
  opts.deterministic = o.deterministic;
  opts.warmup = o.warmup;
  opts.sample_interval = o.sample_interval;
  opts.revision_interval = o.revision_interval;
  opts.record_events = !o.events.empty();
  opts.record_difficulty_history = true;

  echo(ctx, "chain-sim", format,
       {{"config", config_json(config)},
        {"agents", agents_json(agents)},
        {"regime_a", regime_to_string(regime_a)},
        {"regime_b", regime_to_string(regime_b)},
        {"duration", opts.duration},
        {"warmup", opts.warmup},
        {"deterministic", opts.deterministic},
        {"sample_interval", opts.sample_interval},
        {"revision_interval", opts.revision_interval},
        {"difficulty_a", world.difficulty_a},
        {"difficulty_b", world.difficulty_b},
        {"k_schedule", schedule_json(world.k_schedule)},
        {"replicas", o.replicas}});

  // A single run uses --seed directly; replicas use derived streams.
  const auto n = static_cast<std::size_t>(o.replicas);
  std::vector<std::uint64_t> seeds(n, ctx.globals.seed);
  if (n > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      seeds[i] = derive_seed(RngSeed{ctx.globals.seed}, i).value;
    }
  }
  std::vector<SimReport> reports(n);
  std::vector<std::exception_ptr> failures(n);
  std::size_t workers = o.threads > 0
                            ? static_cast<std::size_t>(o.threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          reports[i] = run(world, agents, regime_a, regime_b, opts,
                           RngSeed{seeds[i]});
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  if (!o.events.empty()) write_file(o.events, events_csv(reports[0]), "--events");
  if (!o.series.empty()) {
    std::ostringstream ss;
    write_series(ss, series_from_report(reports[0]));
    write_file(o.series, ss.str(), "--series");
  }
  if (n == 1) {
    emit(ctx, report_json(reports[0], seeds[0], o.samples).dump(2) + "\n");
    return;
  }
  json runs = json::array();
  std::array<double, kPolicyCount> shadow{};
  for (std::size_t i = 0; i < n; ++i) {
    runs.push_back(report_json(reports[i], seeds[i], o.samples));
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      shadow[p] += reports[i].shadow_density[p] / static_cast<double>(n);
    }
  }
  json j{{"seed", ctx.globals.seed},
         {"replicas", runs},
         {"mean_shadow_density", policy_map(shadow)}};
  emit(ctx, j.dump(2) + "\n");
}

// ---- analyze ----

struct AnalyzeOpts {
  std::string series;
  std::string config;
  std::string baseline = "0:1";
  double hysteresis = kDefaultHysteresis;
  std::size_t flank_window = kDefaultFlankWindow;
  std::string estimates;
  std::string zones;
  bool renormalize = false;
};

BaselineWindow parse_baseline(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) {
    throw Error(ErrorCode::kParseError, "baseline must be BEGIN:END",
                "--baseline");
  }
  const double b = parse_double(parts[0], "--baseline");
  const double e = parse_double(parts[1], "--baseline");
  if (b < 0 || e < 0 || b != std::floor(b) || e != std::floor(e)) {
    throw Error(ErrorCode::kParseError, "baseline bounds must be indices",
                "--baseline");
  }
  return {static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
}

void cmd_analyze(const Context& ctx, const AnalyzeOpts& o) {
  const auto format = resolve_format(ctx.globals, "json", true, true);
  const auto config = load_config(o.config, o.renormalize);
  const auto baseline = parse_baseline(o.baseline);
  const auto loaded = load_series(o.series);
  echo(ctx, "analyze", format,
       {{"config", config_json(config)},
        {"series", o.series},
        {"baseline", {baseline.begin, baseline.end}},
        {"hysteresis", o.hysteresis},
        {"flank_window", o.flank_window},
        {"estimates", o.estimates},
        {"zones", o.zones}});
  if (loaded.out_of_order > 0) {
    ctx.log->warn("{} records were out of order and have been sorted",
                  loaded.out_of_order);
  }
  const auto& series = loaded.records;
  const auto periods = detect_fickle_periods(series, baseline, o.hysteresis);
  const auto path = estimate_state_path(series, periods, o.flank_window);
  ctx.log->info("{} records, {} fickle periods", series.size(),
                periods.size());

  if (format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < periods.size(); ++i) {
      const auto& p = periods[i];
      const auto& e = path.periods[i];
      rows.push_back({{"start_index", p.start_index},
                      {"end_index", p.end_index},
                      {"start_timestamp", series[p.start_index].timestamp},
                      {"last_timestamp", series[p.end_index - 1].timestamp},
                      {"trigger_ratio", p.trigger_ratio},
                      {"in_period_share", e.in_period_share},
                      {"flank_share", opt_json(e.flank_share)},
                      {"r_f", opt_json(e.r_f)}});
    }
    json j{{"records", series.size()},
           {"out_of_order", loaded.out_of_order},
           {"periods", rows}};
    emit(ctx, j.dump(2) + "\n");
  } else {
    std::string csv =
        "start_index,end_index,start_timestamp,last_timestamp,trigger_ratio,"
        "in_period_share,flank_share,r_f\n";
    for (std::size_t i = 0; i < periods.size(); ++i) {
      const auto& p = periods[i];
      const auto& e = path.periods[i];
      csv += fmt::format("{},{},{},{},{},{},{},{}\n", p.start_index,
                         p.end_index, series[p.start_index].timestamp,
                         series[p.end_index - 1].timestamp,
                         num(p.trigger_ratio), num(e.in_period_share),
                         opt_csv(e.flank_share), opt_csv(e.r_f));
    }
    emit(ctx, csv);
  }

  if (!o.estimates.empty()) {
    std::string csv = "timestamp,basis,share,r_f_est,r_b_est\n";
    for (const auto& r : path.rows) {
      csv += fmt::format("{},{},{},{},{}\n", r.timestamp, basis_name(r.basis),
                         num(r.share), opt_csv(r.r_f), opt_csv(r.r_b));
    }
    write_file(o.estimates, csv, "--estimates");
  }
  if (!o.zones.empty()) {
    const auto zp = zone_path(path, series, config, ctx.globals.tol);
    std::string csv = "timestamp,zone,k\n";
    for (const auto& r : zp.rows) {
      csv += fmt::format("{},{},{}\n", r.timestamp, zone_row_label(r),
                         num(r.k));
    }
    write_file(o.zones, csv, "--zones");
  }
}

void add_config_option(CLI::App* sub, std::string& path, bool& renormalize) {
  sub->add_option("--config", path, "Game config JSON {k, n_in, n_de, c_stick, powers}")
      ->required();
  sub->add_flag("--renormalize", renormalize,
                "Scale powers to sum to 1 - c_stick instead of rejecting");
}

}  // namespace

GameConfig parse_config(const std::string& json_text, bool renormalize) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), "--config");
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "config must be a JSON object",
                "--config");
  }
  static const std::set<std::string> kFields{"k", "n_in", "n_de", "c_stick",
                                             "powers"};
  for (const auto& [key, value] : j.items()) {
    if (!kFields.count(key)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config field " + key,
                  key);
    }
  }
  RawGameConfig raw;
  raw.k = number_field(j, "k");
  raw.n_in = integer_field(j, "n_in");
  raw.n_de = integer_field(j, "n_de");
  raw.c_stick = number_field(j, "c_stick");
  if (!j.contains("powers") || !j["powers"].is_array()) {
    throw Error(ErrorCode::kParseError, "powers must be an array", "powers");
  }
  for (const auto& p : j["powers"]) {
    if (!p.is_number()) {
      throw Error(ErrorCode::kParseError, "powers must be numbers", "powers");
    }
    raw.powers.push_back(p.get<double>());
  }
  return validate_config(raw, renormalize);
}

GameConfig load_config(const std::string& path, bool renormalize) {
  return parse_config(read_file(path, "--config"), renormalize);
}

Schedule load_schedule(const std::string& path, const std::string& field) {
  std::istringstream in(read_file(path, field));
  std::string line;
  Schedule s;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "at,value") {
        throw Error(ErrorCode::kParseError,
                    "schedule header must be 'at,value'", field);
      }
      header = true;
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != 2) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("line {}: expected 2 columns", lineno), field);
    }
    s.push_back({parse_double(trim(parts[0]), field),
                 parse_double(trim(parts[1]), field)});
  }
  if (!header) {
    throw Error(ErrorCode::kParseError, "empty schedule file", field);
  }
  check_schedule(s, field);
  return s;
}

std::vector<MinerAgent> load_agents(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path, "--agents"));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), "--agents");
  }
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, "agents must be a JSON array",
                "--agents");
  }
  std::vector<MinerAgent> agents;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& a = j[i];
    const auto where = fmt::format("agents[{}]", i);
    if (!a.is_object()) {
      throw Error(ErrorCode::kParseError, "agent must be an object", where);
    }
    MinerAgent m;
    m.id = a.contains("id") && a["id"].is_string() ? a["id"].get<std::string>()
                                                   : fmt::format("agent{}", i);
    if (!a.contains("power") || !a["power"].is_number()) {
      throw Error(ErrorCode::kParseError, "power must be a number",
                  where + ".power");
    }
    m.power = a["power"].get<double>();
    if (!a.contains("policy") || !a["policy"].is_string()) {
      throw Error(ErrorCode::kParseError, "policy must be a string",
                  where + ".policy");
    }
    const auto policy = parse_strategy(a["policy"].get<std::string>());
    if (!policy) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown policy " + a["policy"].get<std::string>(),
                  where + ".policy");
    }
    m.policy = *policy;
    if (a.contains("faction")) m.faction = a["faction"].get<bool>();
    if (a.contains("revising")) m.revising = a["revising"].get<bool>();
    agents.push_back(std::move(m));
  }
  return agents;
}

MiningState parse_state(const std::string& text, const std::string& field) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw Error(ErrorCode::kParseError, "state must be 'r_f,r_b'", field);
  }
  MiningState s{parse_double(trim(parts[0]), field),
                parse_double(trim(parts[1]), field)};
  if (!is_valid_state(s)) {
    throw Error(ErrorCode::kInvalidState,
                fmt::format("({}, {}) is outside the simplex", s.r_f, s.r_b),
                field);
  }
  return s;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  std::vector<const char*> argv{"dualchain"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.log = make_logger(err);
  auto& g = ctx.globals;

  CLI::App app{"Two-chain proof-of-work mining economics", "dualchain"};
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", g.quiet, "Do not echo the resolved config");
  app.add_option("--tol", g.tol, "Zone tie tolerance")->capture_default_str();

  std::function<void()> action;

  PayoffOpts payoff_o;
  auto* payoff_cmd = app.add_subcommand("payoff", "Payoff densities at a state");
  add_config_option(payoff_cmd, payoff_o.config, payoff_o.renormalize);
  payoff_cmd->add_option("--state", payoff_o.state, "r_f,r_b")->required();
  payoff_cmd->callback([&] { action = [&] { cmd_payoff(ctx, payoff_o); }; });

  ZonesOpts zones_o;
  auto* zones_cmd = app.add_subcommand("zones", "Zone map over a grid");
  add_config_option(zones_cmd, zones_o.config, zones_o.renormalize);
  zones_cmd->add_option("--grid", zones_o.grid, "Grid points per axis")
      ->capture_default_str();
  zones_cmd->callback([&] { action = [&] { cmd_zones(ctx, zones_o); }; });

  ConfigOpts eq_o;
  auto* eq_cmd = app.add_subcommand("equilibria", "Equilibrium set");
  add_config_option(eq_cmd, eq_o.config, eq_o.renormalize);
  eq_cmd->callback([&] { action = [&] { cmd_equilibria(ctx, eq_o); }; });

  SimulateOpts sim_o;
  auto* sim_cmd = app.add_subcommand("simulate", "Zone-driven flow trajectory");
  add_config_option(sim_cmd, sim_o.config, sim_o.renormalize);
  sim_cmd->add_option("--initial", sim_o.initial, "r_f,r_b")->required();
  sim_cmd->add_option("--k-schedule", sim_o.k_schedule, "CSV at,value");
  sim_cmd->add_option("--c-stick-schedule", sim_o.c_stick_schedule,
                      "CSV at,value");
  sim_cmd->add_option("--rate", sim_o.rate, "Migration rate per step")
      ->capture_default_str();
  sim_cmd->add_option("--max-steps", sim_o.max_steps)->capture_default_str();
  sim_cmd->add_option("--eps", sim_o.eps, "Convergence distance")
      ->capture_default_str();
  sim_cmd->callback([&] { action = [&] { cmd_simulate(ctx, sim_o); }; });

  BestResponseOpts br_o;
  auto* br_cmd =
      app.add_subcommand("best-response", "Single-player best-response dynamics");
  add_config_option(br_cmd, br_o.config, br_o.renormalize);
  br_cmd->add_option("--assignment", br_o.assignment,
                     "Comma-separated strategies, one per player (default "
                     "all a_only)");
  br_cmd->add_option("--max-steps", br_o.max_steps)->capture_default_str();
  br_cmd->add_option("--gain-tol", br_o.gain_tol)->capture_default_str();
  br_cmd->callback([&] { action = [&] { cmd_best_response(ctx, br_o); }; });

  ChainSimOpts cs_o;
  auto* cs_cmd = app.add_subcommand("chain-sim", "Block-level simulation");
  add_config_option(cs_cmd, cs_o.config, cs_o.renormalize);
  cs_cmd->add_option("--agents", cs_o.agents, "Agent roster JSON")->required();
  cs_cmd->add_option("--regime-a", cs_o.regime_a,
                     "epoch:N | eda:N[:W:T:F] | window:W")
      ->required();
  cs_cmd->add_option("--regime-b", cs_o.regime_b)->required();
  cs_cmd->add_option("--duration", cs_o.duration, "P_ag")->required();
  cs_cmd->add_option("--warmup", cs_o.warmup)->capture_default_str();
  cs_cmd->add_option("--sample-interval", cs_o.sample_interval)
      ->capture_default_str();
  cs_cmd->add_option("--revision-interval", cs_o.revision_interval)
      ->capture_default_str();
  cs_cmd->add_option("--difficulty-a", cs_o.difficulty_a,
                     "Initial D_A (default: non-B-only power)");
  cs_cmd->add_option("--difficulty-b", cs_o.difficulty_b,
                     "Initial D_B (default: B-only power)");
  cs_cmd->add_flag("--deterministic", cs_o.deterministic,
                   "Blocks take exactly their expected time");
  cs_cmd->add_flag("--samples", cs_o.samples, "Embed occupancy samples");
  cs_cmd->add_option("--replicas", cs_o.replicas)->capture_default_str();
  cs_cmd->add_option("--threads", cs_o.threads, "Worker threads (0: auto)");
  cs_cmd->add_option("--events", cs_o.events, "Event log CSV");
  cs_cmd->add_option("--series", cs_o.series,
                     "Sampled hash-rate series CSV (analyze input)");
  cs_cmd->add_option("--k-schedule", cs_o.k_schedule, "CSV at,value (P_ag)");
  cs_cmd->callback([&] { action = [&] { cmd_chain_sim(ctx, cs_o); }; });

  AnalyzeOpts an_o;
  auto* an_cmd = app.add_subcommand("analyze", "Hash-rate series analysis");
  add_config_option(an_cmd, an_o.config, an_o.renormalize);
  an_cmd->add_option("--series", an_o.series, "Series CSV")->required();
  an_cmd->add_option("--baseline", an_o.baseline, "BEGIN:END record indices")
      ->capture_default_str();
  an_cmd->add_option("--hysteresis", an_o.hysteresis)->capture_default_str();
  an_cmd->add_option("--flank-window", an_o.flank_window)
      ->capture_default_str();
  an_cmd->add_option("--estimates", an_o.estimates, "Estimates CSV");
  an_cmd->add_option("--zones", an_o.zones, "Zone path CSV");
  an_cmd->callback([&] { action = [&] { cmd_analyze(ctx, an_o); }; });

  ConfigOpts th_o;
  auto* th_cmd = app.add_subcommand("threshold", "Automatic-mining threshold");
  add_config_option(th_cmd, th_o.config, th_o.renormalize);
  th_cmd->callback([&] { action = [&] { cmd_threshold(ctx, th_o); }; });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage", e.what(), "");
    return kExitValidation;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    write_error(err, error_code_name(e.code()), e.what(), e.field());
    return kExitValidation;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what(), "");
    return kExitInternal;
  }
}

}  // namespace dualchain::cli

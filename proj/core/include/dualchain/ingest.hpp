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

// Hash-rate time series: loading, fickle period detection and
// reconstruction of the (r_f, r_b) path.
//
// A fickle period is a stretch where B's difficulty relative to A's is below
// the price ratio, which is when switching miners sit on B. Inside a period
// the B share of hash rate is r_f + r_b; outside it is r_b alone, so each
// period yields one r_f estimate as the jump between the two.

#ifndef DUALCHAIN_INGEST_HPP_
#define DUALCHAIN_INGEST_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualchain/chainsim.hpp"
#include "dualchain/core.hpp"

namespace dualchain {

inline constexpr std::string_view kSeriesHeader =
    "timestamp,hashrate_a,hashrate_b,difficulty_a,difficulty_b,price_ratio_k";

struct SeriesRecord {
  std::int64_t timestamp = 0;
  double hashrate_a = 0.0;
  double hashrate_b = 0.0;
  double difficulty_a = 0.0;
  double difficulty_b = 0.0;
  double price_ratio_k = 0.0;
};

struct LoadedSeries {
  std::vector<SeriesRecord> records;
  // Records that appeared before an earlier timestamp and were reordered.
  std::size_t out_of_order = 0;
};

// Throws kIoError, kParseError (field "line N"), kInvariantViolation
// (field "line N: column") or kEmptySeries. Duplicate timestamps are
// invariant violations.
LoadedSeries load_series(const std::string& path);
LoadedSeries parse_series(std::istream& in);

void write_series(std::ostream& out, const std::vector<SeriesRecord>& series);

// Record index range [begin, end) during which all power mined A.
struct BaselineWindow {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct FicklePeriod {
  // Half-open record range [start_index, end_index).
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  // D_B / D_A at the opening record.
  double trigger_ratio = 0.0;
};

inline constexpr double kDefaultHysteresis = 0.02;

// Difficulties divided by the mean difficulty_a over the baseline window.
// Both chains share one scale, so D_B / D_A is unchanged. Throws kNoBaseline
// if the window is empty or out of range.
std::vector<SeriesRecord> normalize_difficulty(
    const std::vector<SeriesRecord>& series, BaselineWindow baseline);

// A period opens when D_B / D_A < k (1 - hysteresis) and closes at the first
// record with D_B / D_A > k (1 + hysteresis); an unclosed period ends at the
// series end. Throws kNoBaseline or kInvalidArgument (fewer than 2 records).
std::vector<FicklePeriod> detect_fickle_periods(
    const std::vector<SeriesRecord>& series, BaselineWindow baseline,
    double hysteresis = kDefaultHysteresis);

enum class Basis { kGrayPeriod, kNonGray };
std::string_view basis_name(Basis b);

struct StateEstimate {
  std::int64_t timestamp = 0;
  Basis basis = Basis::kNonGray;
  // hashrate_b / (hashrate_a + hashrate_b).
  double share = 0.0;
  std::optional<double> r_f;
  std::optional<double> r_b;
};

struct PeriodEstimate {
  std::size_t period = 0;
  double in_period_share = 0.0;
  std::optional<double> flank_share;
  // Absent when no non-gray records flank the period.
  std::optional<double> r_f;
};

struct StatePath {
  std::vector<StateEstimate> rows;
  std::vector<PeriodEstimate> periods;
};

inline constexpr std::size_t kDefaultFlankWindow = 24;

// Gray rows take r_f from their own period and r_b = share - r_f; other rows
// have r_b = share and carry the latest period's r_f forward.
StatePath estimate_state_path(const std::vector<SeriesRecord>& series,
                              const std::vector<FicklePeriod>& periods,
                              std::size_t flank_window = kDefaultFlankWindow);

struct ZoneRow {
  std::int64_t timestamp = 0;
  double k = 0.0;
  std::optional<MiningState> state;
  // Absent when the state is unresolved or divergent.
  std::optional<Zone> zone;
  bool divergent = false;
};

std::string_view zone_row_label(const ZoneRow& row);

struct ZoneTransition {
  std::size_t index = 0;
  std::int64_t timestamp = 0;
  Zone from = Zone::kZone1;
  Zone to = Zone::kZone1;
};

struct ZonePath {
  std::vector<ZoneRow> rows;
  std::vector<ZoneTransition> transitions;
};

// Zone of every record, judged with the record's own k and the config's
// block counts. Throws kUnresolvableState when no period produced an r_f.
ZonePath zone_path(const StatePath& path,
                   const std::vector<SeriesRecord>& series,
                   const GameConfig& config, double tol = kZoneTolerance);

// One record per sample of a simulation report, with timestamps at
// `seconds_per_pag` seconds per P_ag.
std::vector<SeriesRecord> series_from_report(const SimReport& report,
                                             double seconds_per_pag = 600.0);

}  // namespace dualchain

#endif  // DUALCHAIN_INGEST_HPP_

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

#include "dualchain/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dualchain/equilibrium.hpp"

namespace dualchain {
namespace {

std::string line_field(std::size_t line) {
  return "line " + std::to_string(line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(',', pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::int64_t to_int(std::string_view s, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError,
                "invalid integer '" + std::string(s) + "'", line_field(line));
  }
  return v;
}

double to_double(std::string_view s, std::size_t line) {
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw Error(ErrorCode::kParseError, "invalid number '" + copy + "'",
                line_field(line));
  }
  return v;
}

[[noreturn]] void violation(std::size_t line, std::string_view column,
                            const std::string& msg) {
  throw Error(ErrorCode::kInvariantViolation, msg,
              line_field(line) + ": " + std::string(column));
}

double ratio(const SeriesRecord& r) { return r.difficulty_b / r.difficulty_a; }

double share(const SeriesRecord& r) {
  return r.hashrate_b / (r.hashrate_a + r.hashrate_b);
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (n % 2 == 1) return hi;
  const double lo =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

void check_baseline(const std::vector<SeriesRecord>& series,
                    BaselineWindow baseline) {
  if (baseline.begin >= baseline.end || baseline.end > series.size()) {
    throw Error(ErrorCode::kNoBaseline,
                "baseline window is empty or outside the series", "baseline");
  }
}

}  // namespace

LoadedSeries parse_series(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  LoadedSeries out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!header_seen) {
      if (view != kSeriesHeader) {
        throw Error(ErrorCode::kParseError,
                    "expected header '" + std::string(kSeriesHeader) + "'",
                    line_field(line_no));
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string_view> cells = split_csv(view);
    if (cells.size() != 6) {
      throw Error(ErrorCode::kParseError,
                  "expected 6 columns, got " + std::to_string(cells.size()),
                  line_field(line_no));
    }
    SeriesRecord r;
    r.timestamp = to_int(cells[0], line_no);
    r.hashrate_a = to_double(cells[1], line_no);
    r.hashrate_b = to_double(cells[2], line_no);
    r.difficulty_a = to_double(cells[3], line_no);
    r.difficulty_b = to_double(cells[4], line_no);
    r.price_ratio_k = to_double(cells[5], line_no);
    if (!(r.hashrate_a >= 0.0) || !std::isfinite(r.hashrate_a)) {
      violation(line_no, "hashrate_a", "hash rate must be finite and >= 0");
    }
    if (!(r.hashrate_b >= 0.0) || !std::isfinite(r.hashrate_b)) {
      violation(line_no, "hashrate_b", "hash rate must be finite and >= 0");
    }
    if (r.hashrate_a + r.hashrate_b == 0.0) {
      violation(line_no, "hashrate_a", "hash rates must not both be zero");
    }
    if (!(r.difficulty_a > 0.0) || !std::isfinite(r.difficulty_a)) {
      violation(line_no, "difficulty_a", "difficulty must be positive");
    }
    if (!(r.difficulty_b > 0.0) || !std::isfinite(r.difficulty_b)) {
      violation(line_no, "difficulty_b", "difficulty must be positive");
    }
    if (!(r.price_ratio_k > 0.0 && r.price_ratio_k <= 1.0)) {
      violation(line_no, "price_ratio_k", "k must lie in (0, 1]");
    }
    if (!out.records.empty() && r.timestamp < out.records.back().timestamp) {
      ++out.out_of_order;
    }
    out.records.push_back(r);
  }
  if (!header_seen) {
    throw Error(ErrorCode::kEmptySeries, "series has no header", "series");
  }
  if (out.records.empty()) {
    throw Error(ErrorCode::kEmptySeries, "series has no records", "series");
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const SeriesRecord& a, const SeriesRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    if (out.records[i].timestamp == out.records[i - 1].timestamp) {
      throw Error(ErrorCode::kInvariantViolation,
                  "duplicate timestamp " +
                      std::to_string(out.records[i].timestamp),
                  "timestamp");
    }
  }
  return out;
}

LoadedSeries load_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path + "'", "path");
  }
  return parse_series(in);
}

void write_series(std::ostream& out, const std::vector<SeriesRecord>& series) {
  out << kSeriesHeader << '\n';
  out << std::setprecision(17);
  for (const SeriesRecord& r : series) {
    out << r.timestamp << ',' << r.hashrate_a << ',' << r.hashrate_b << ','
        << r.difficulty_a << ',' << r.difficulty_b << ',' << r.price_ratio_k
        << '\n';
  }
}

std::vector<SeriesRecord> normalize_difficulty(
    const std::vector<SeriesRecord>& series, BaselineWindow baseline) {
  check_baseline(series, baseline);
  double sum = 0.0;
  for (std::size_t i = baseline.begin; i < baseline.end; ++i) {
    sum += series[i].difficulty_a;
  }
  const double scale = sum / static_cast<double>(baseline.end - baseline.begin);
  std::vector<SeriesRecord> out = series;
  for (SeriesRecord& r : out) {
    r.difficulty_a /= scale;
    r.difficulty_b /= scale;
  }
  return out;
}

std::vector<FicklePeriod> detect_fickle_periods(
    const std::vector<SeriesRecord>& series, BaselineWindow baseline,
    double hysteresis) {
  if (series.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "period detection needs at least 2 records", "series");
  }
  if (!(hysteresis >= 0.0 && hysteresis < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "hysteresis must lie in [0, 1)",
                "hysteresis");
  }
  const std::vector<SeriesRecord> norm = normalize_difficulty(series, baseline);
  std::vector<FicklePeriod> out;
  bool open = false;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const double r = ratio(norm[i]);
    const double k = norm[i].price_ratio_k;
    if (!open && r < k * (1.0 - hysteresis)) {
      out.push_back({i, norm.size(), r});
      open = true;
    } else if (open && r > k * (1.0 + hysteresis)) {
      out.back().end_index = i;
      open = false;
    }
  }
  return out;
}

std::string_view basis_name(Basis b) {
  return b == Basis::kGrayPeriod ? "gray" : "non_gray";
}

StatePath estimate_state_path(const std::vector<SeriesRecord>& series,
                              const std::vector<FicklePeriod>& periods,
                              std::size_t flank_window) {
  const std::size_t n = series.size();
  std::vector<int> period_of(n, -1);
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const FicklePeriod& fp = periods[p];
    if (fp.start_index >= fp.end_index || fp.end_index > n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "period index range is empty or outside the series",
                  "periods");
    }
    for (std::size_t i = fp.start_index; i < fp.end_index; ++i) {
      period_of[i] = static_cast<int>(p);
    }
  }

  StatePath path;
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const FicklePeriod& fp = periods[p];
    std::vector<double> in;
    for (std::size_t i = fp.start_index; i < fp.end_index; ++i) {
      in.push_back(share(series[i]));
    }
    std::vector<double> flank;
    for (std::size_t i = fp.start_index, taken = 0;
         i > 0 && taken < flank_window && period_of[i - 1] < 0; --i, ++taken) {
      flank.push_back(share(series[i - 1]));
    }
    for (std::size_t i = fp.end_index, taken = 0;
         i < n && taken < flank_window && period_of[i] < 0; ++i, ++taken) {
      flank.push_back(share(series[i]));
    }
    PeriodEstimate est;
    est.period = p;
    est.in_period_share = median(in);
    if (!flank.empty()) {
      est.flank_share = median(flank);
      est.r_f = std::clamp(est.in_period_share - *est.flank_share, 0.0, 1.0);
    }
    path.periods.push_back(est);
  }

  std::optional<double> carried;
  for (std::size_t i = 0; i < n; ++i) {
    StateEstimate row;
    row.timestamp = series[i].timestamp;
    row.share = share(series[i]);
    if (period_of[i] >= 0) {
      const PeriodEstimate& est = path.periods[static_cast<std::size_t>(period_of[i])];
      row.basis = Basis::kGrayPeriod;
      if (est.r_f) {
        row.r_f = est.r_f;
        row.r_b = std::max(0.0, row.share - *est.r_f);
        carried = est.r_f;
      }
    } else {
      row.basis = Basis::kNonGray;
      row.r_b = row.share;
      row.r_f = carried;
    }
    path.rows.push_back(row);
  }
  return path;
}

std::string_view zone_row_label(const ZoneRow& row) {
  if (row.zone) return zone_name(*row.zone);
  return row.divergent ? "divergent" : "unresolved";
}

ZonePath zone_path(const StatePath& path,
                   const std::vector<SeriesRecord>& series,
                   const GameConfig& config, double tol) {
  if (path.rows.size() != series.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "state path and series differ in length", "series");
  }
  const bool any = std::any_of(path.periods.begin(), path.periods.end(),
                               [](const PeriodEstimate& e) { return e.r_f.has_value(); });
  if (!any) {
    throw Error(ErrorCode::kUnresolvableState,
                "no fickle period produced an r_f estimate", "series");
  }
  ZonePath out;
  std::optional<Zone> last;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const StateEstimate& est = path.rows[i];
    ZoneRow row;
    row.timestamp = est.timestamp;
    row.k = series[i].price_ratio_k;
    if (est.r_f && est.r_b) {
      MiningState s{std::clamp(*est.r_f, 0.0, 1.0), std::clamp(*est.r_b, 0.0, 1.0)};
      s.r_b = std::min(s.r_b, 1.0 - s.r_f);
      row.state = s;
      GameParams params = config.params();
      params.k = row.k;
      try {
        row.zone = zone_of(s, params, tol);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivergentState) throw;
        row.divergent = true;
      }
    }
    if (row.zone) {
      if (last && *last != *row.zone) {
        out.transitions.push_back({i, row.timestamp, *last, *row.zone});
      }
      last = row.zone;
    }
    out.rows.push_back(row);
  }
  return out;
}

std::vector<SeriesRecord> series_from_report(const SimReport& report,
                                             double seconds_per_pag) {
  std::vector<SeriesRecord> out;
  out.reserve(report.samples.size());
  for (const Sample& s : report.samples) {
    out.push_back({static_cast<std::int64_t>(std::llround(s.time * seconds_per_pag)),
                   s.power_a, s.power_b, s.difficulty_a, s.difficulty_b, s.k});
  }
  return out;
}

}  // namespace dualchain

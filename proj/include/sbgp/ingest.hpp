// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbgp/io.hpp"
#include "sbgp/sample.hpp"

namespace sbgp {

/// Civil-calendar day arithmetic on a serial day number (days since
/// 1970-01-01, proleptic Gregorian).
namespace dates {

inline long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

struct Civil {
  int year;
  int month;
  int day;
};

inline Civil civil_from_days(long z) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Civil{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

/// Parse strict ISO-8601 "YYYY-MM-DD" to a serial day.
inline long parse_iso_date(const std::string& s, const std::string& context) {
  auto fail = [&]() -> long {
    throw std::runtime_error(context + ": cannot parse '" + s + "' as an ISO date");
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return fail();
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return fail();
  const int y = std::stoi(s.substr(0, 4));
  const int m = std::stoi(s.substr(5, 2));
  const int d = std::stoi(s.substr(8, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31) return fail();
  const long serial = days_from_civil(y, m, d);
  const Civil back = civil_from_days(serial);
  if (back.year != y || back.month != m || back.day != d) return fail();
  return serial;
}

inline std::string iso_string(long serial) {
  const Civil c = civil_from_days(serial);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

/// Month-day pair for within-year season bounds.
struct MonthDay {
  int month;
  int day;

  friend bool operator<=(MonthDay a, MonthDay b) {
    return a.month < b.month || (a.month == b.month && a.day <= b.day);
  }
};

inline MonthDay parse_month_day(const std::string& s, const std::string& context) {
  if (s.size() != 5 || s[2] != '-')
    throw std::runtime_error(context + ": expected MM-DD, got '" + s + "'");
  const int m = std::stoi(s.substr(0, 2));
  const int d = std::stoi(s.substr(3, 2));
  if (m < 1 || m > 12 || d < 1 || d > 31)
    throw std::runtime_error(context + ": invalid month-day '" + s + "'");
  return MonthDay{m, d};
}

}  // namespace dates

/// A dated bivariate series. Rows with missing values have already been
/// dropped at ingestion (and counted); dates are strictly increasing.
struct BivariateSeries {
  std::vector<long> days;  ///< serial day numbers, strictly increasing
  Sample values;
  std::array<std::string, 2> labels;
  int dropped_missing = 0;
  int sort_warnings = 0;
  std::vector<std::string> notes;
};

namespace detail {

inline bool is_missing(const std::string& field) {
  if (field.empty()) return true;
  std::string t;
  for (char c : field)
    if (c != ' ' && c != '\t' && c != '\r') t.push_back(c);
  return t.empty() || t == "NA" || t == "na" || t == "NaN" || t == "nan" || t == "NULL";
}

}  // namespace detail

/// Load a dated CSV, keeping the named date column and two value columns.
/// Rows with missing values are dropped (counted); any other unparseable cell
/// is an error naming the line and column. Duplicate dates are an error;
/// out-of-order dates are sorted with a warning count.
inline BivariateSeries load_csv(const std::string& path, const std::string& date_column,
                                const std::array<std::string, 2>& value_columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  auto find_col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("csv file '" + path + "': no column named '" + name + "'");
  };
  const std::size_t date_idx = find_col(date_column);
  const std::array<std::size_t, 2> value_idx{find_col(value_columns[0]),
                                             find_col(value_columns[1])};

  struct Row {
    long day;
    double v1, v2;
  };
  std::vector<Row> rows;
  BivariateSeries series;
  series.labels = value_columns;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string ctx = path + " line " + std::to_string(line_no);
    if (fields.size() <= std::max({date_idx, value_idx[0], value_idx[1]}))
      throw std::runtime_error(ctx + ": too few columns");
    const std::string& f1 = fields[value_idx[0]];
    const std::string& f2 = fields[value_idx[1]];
    if (detail::is_missing(f1) || detail::is_missing(f2)) {
      ++series.dropped_missing;
      continue;
    }
    Row row;
    row.day = dates::parse_iso_date(fields[date_idx], ctx + " column '" + date_column + "'");
    row.v1 = detail::parse_double(f1, ctx + " column '" + value_columns[0] + "'");
    row.v2 = detail::parse_double(f2, ctx + " column '" + value_columns[1] + "'");
    rows.push_back(row);
  }

  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].day < rows[i - 1].day) ++series.sort_warnings;
  if (series.sort_warnings > 0) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.day < b.day; });
    series.notes.push_back("input dates were out of order (" +
                           std::to_string(series.sort_warnings) + " inversions); sorted");
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].day == rows[i - 1].day)
      throw std::runtime_error(path + ": duplicate date " + dates::iso_string(rows[i].day));

  series.days.reserve(rows.size());
  series.values.resize(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    series.days.push_back(rows[i].day);
    series.values(static_cast<Eigen::Index>(i), 0) = rows[i].v1;
    series.values(static_cast<Eigen::Index>(i), 1) = rows[i].v2;
  }
  return series;
}

/// Collapse a daily series to per-column maxima over consecutive 7-day blocks
/// anchored at the first date. Blocks with any missing day are dropped; a
/// trailing partial block is dropped.
inline BivariateSeries weekly_maxima(const BivariateSeries& series) {
  BivariateSeries out;
  out.labels = series.labels;
  out.dropped_missing = series.dropped_missing;
  out.sort_warnings = series.sort_warnings;
  out.notes = series.notes;
  if (series.days.size() < 7) {
    out.values.resize(0, 2);
    out.notes.push_back("series shorter than 7 days; no weekly blocks");
    return out;
  }
  std::vector<long> block_days;
  std::vector<std::array<double, 2>> block_values;
  const long anchor = series.days.front();
  std::size_t i = 0;
  while (i < series.days.size()) {
    const long block_start = anchor + 7 * ((series.days[i] - anchor) / 7);
    const long block_end = block_start + 6;
    double m1 = series.values(static_cast<Eigen::Index>(i), 0);
    double m2 = series.values(static_cast<Eigen::Index>(i), 1);
    std::size_t count = 0;
    while (i < series.days.size() && series.days[i] <= block_end) {
      m1 = std::max(m1, series.values(static_cast<Eigen::Index>(i), 0));
      m2 = std::max(m2, series.values(static_cast<Eigen::Index>(i), 1));
      ++count;
      ++i;
    }
    if (count == 7) {
      block_days.push_back(block_start);
      block_values.push_back({m1, m2});
    }
  }
  out.days = std::move(block_days);
  out.values.resize(static_cast<Eigen::Index>(out.days.size()), 2);
  for (std::size_t k = 0; k < out.days.size(); ++k) {
    out.values(static_cast<Eigen::Index>(k), 0) = block_values[k][0];
    out.values(static_cast<Eigen::Index>(k), 1) = block_values[k][1];
  }
  return out;
}

/// Keep rows whose date falls in the [start, end] month-day window of any
/// year, inclusive; a window with start > end wraps across the year end.
inline BivariateSeries season_filter(const BivariateSeries& series, dates::MonthDay start,
                                     dates::MonthDay end) {
  BivariateSeries out;
  out.labels = series.labels;
  out.dropped_missing = series.dropped_missing;
  out.sort_warnings = series.sort_warnings;
  out.notes = series.notes;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    const auto c = dates::civil_from_days(series.days[i]);
    const dates::MonthDay md{c.month, c.day};
    const bool in_window =
        start <= end ? (start <= md && md <= end) : (start <= md || md <= end);
    if (in_window) keep.push_back(i);
  }
  out.days.reserve(keep.size());
  out.values.resize(static_cast<Eigen::Index>(keep.size()), 2);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.days.push_back(series.days[keep[k]]);
    out.values.row(static_cast<Eigen::Index>(k)) =
        series.values.row(static_cast<Eigen::Index>(keep[k]));
  }
  return out;
}

/// Rows where at least one column exceeds its empirical threshold (the order
/// statistic at ceil(n * level)), i.e. the L-shaped exceedance region.
struct ExceedanceSet {
  double threshold_level;
  std::array<double, 2> thresholds;
  Sample rows;  ///< retained observations, original scale
  Eigen::Index total_n;

  /// Exceedances recentred at the thresholds (the scale the model lives on).
  Sample centered() const {
    Sample c = rows;
    c.col(0).array() -= thresholds[0];
    c.col(1).array() -= thresholds[1];
    return c;
  }
};

inline ExceedanceSet exceedance_set(const BivariateSeries& series, double level) {
  if (!(level > 0.0) || !(level < 1.0))
    throw std::domain_error("exceedance_set: level must be in (0,1)");
  const Eigen::Index n = series.values.rows();
  if (n < 10) throw std::domain_error("exceedance_set: need at least 10 rows");
  ExceedanceSet set;
  set.threshold_level = level;
  set.total_n = n;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> col(series.values.col(j).data(), series.values.col(j).data() + n);
    if (*std::max_element(col.begin(), col.end()) == *std::min_element(col.begin(), col.end()))
      throw std::domain_error("exceedance_set: column '" +
                              series.labels[static_cast<std::size_t>(j)] + "' is constant");
    std::sort(col.begin(), col.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(n)));  // 1-based order statistic
    set.thresholds[static_cast<std::size_t>(j)] = col[idx - 1];
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (series.values(i, 0) > set.thresholds[0] || series.values(i, 1) > set.thresholds[1])
      keep.push_back(i);
  set.rows.resize(static_cast<Eigen::Index>(keep.size()), 2);
  for (std::size_t k = 0; k < keep.size(); ++k)
    set.rows.row(static_cast<Eigen::Index>(k)) = series.values.row(keep[k]);
  return set;
}

}  // namespace sbgp

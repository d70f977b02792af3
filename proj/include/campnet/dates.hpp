#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace campnet {

// Calendar date in UTC. Ordered by serial day number.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  static Date from_serial(std::int64_t days);  // days since 1970-01-01
  std::int64_t serial() const;
  int month_index() const { return year * 12 + (month - 1); }
  std::string iso() const;          // YYYY-MM-DD
  std::string month_label() const;  // YYYY-MM

  friend bool operator==(const Date& a, const Date& b) {
    return a.year == b.year && a.month == b.month && a.day == b.day;
  }
  friend bool operator!=(const Date& a, const Date& b) { return !(a == b); }
  friend bool operator<(const Date& a, const Date& b) { return a.serial() < b.serial(); }
  friend bool operator<=(const Date& a, const Date& b) { return a.serial() <= b.serial(); }
  friend bool operator>(const Date& a, const Date& b) { return b < a; }
  friend bool operator>=(const Date& a, const Date& b) { return b <= a; }
};

bool valid_date(int year, int month, int day);

// Parses YYYY-MM-DD. Returns nullopt on malformed or out-of-range input.
std::optional<Date> parse_date(std::string_view s);

// Seconds since the Unix epoch, UTC.
using UnixTime = std::int64_t;

// ISO-8601 subset: "YYYY-MM-DD", optionally followed by "THH:MM:SS" (or a
// space separator), an ignored fractional part, and "Z" or a +HH:MM offset.
// Offsets are applied so the result is always UTC.
std::optional<UnixTime> parse_timestamp(std::string_view s);

Date date_of(UnixTime t);
std::string format_timestamp(UnixTime t);  // YYYY-MM-DDTHH:MM:SSZ

enum class Granularity { monthly, biweekly };

std::string to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view s);

// Half-open [start, end) span of whole days on a fixed grid.
struct TimeWindow {
  Date start;
  Date end;
  Granularity granularity = Granularity::monthly;

  bool contains(UnixTime t) const;
  bool contains(const Date& d) const { return start <= d && d < end; }
  std::string label() const;  // monthly: YYYY-MM, biweekly: start date ISO

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Window containing t. Biweekly windows are 14-day spans aligned to anchor.
TimeWindow window_for(UnixTime t, Granularity g, const Date& anchor);
TimeWindow window_for(const Date& d, Granularity g, const Date& anchor);

// Signed number of whole grid steps from a to b (months or 14-day spans).
std::int64_t window_gap(const TimeWindow& a, const TimeWindow& b);

// The next window on the grid.
TimeWindow next_window(const TimeWindow& w);

// Default biweekly anchor: a Sunday that aligns the 2015-2017 span grid.
inline constexpr int kDefaultAnchorYear = 2015;
Date default_anchor();

}  // namespace campnet

#include "campnet/dates.hpp"

#include <cstdio>
#include <stdexcept>

namespace campnet {

namespace {

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int dim[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return dim[m - 1];
}

// Reads exactly n digits starting at pos; advances pos. Returns nullopt otherwise.
std::optional<int> read_digits(std::string_view s, std::size_t& pos, int n) {
  if (pos + n > s.size()) return std::nullopt;
  int v = 0;
  for (int i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(n);
  return v;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

bool valid_date(int year, int month, int day) {
  if (month < 1 || month > 12) return false;
  if (day < 1 || day > days_in_month(year, month)) return false;
  return true;
}

Date Date::from_serial(std::int64_t days) {
  Date d;
  civil_from_days(days, d.year, d.month, d.day);
  return d;
}

std::int64_t Date::serial() const { return days_from_civil(year, month, day); }

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string Date::month_label() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

std::optional<Date> parse_date(std::string_view s) {
  std::size_t pos = 0;
  auto y = read_digits(s, pos, 4);
  if (!y || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto m = read_digits(s, pos, 2);
  if (!m || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto d = read_digits(s, pos, 2);
  if (!d || pos != s.size()) return std::nullopt;
  if (!valid_date(*y, *m, *d)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::optional<UnixTime> parse_timestamp(std::string_view s) {
  std::size_t pos = 0;
  auto y = read_digits(s, pos, 4);
  if (!y || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto mo = read_digits(s, pos, 2);
  if (!mo || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto d = read_digits(s, pos, 2);
  if (!d) return std::nullopt;
  if (!valid_date(*y, *mo, *d)) return std::nullopt;

  int hh = 0, mi = 0, ss = 0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
    ++pos;
    auto h = read_digits(s, pos, 2);
    if (!h || pos >= s.size() || s[pos] != ':') return std::nullopt;
    ++pos;
    auto m2 = read_digits(s, pos, 2);
    if (!m2) return std::nullopt;
    hh = *h;
    mi = *m2;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      auto s2 = read_digits(s, pos, 2);
      if (!s2) return std::nullopt;
      ss = *s2;
    }
    if (hh > 23 || mi > 59 || ss > 59) return std::nullopt;
    // Fractional seconds are parsed and discarded.
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        ++pos;
        ++digits;
      }
      if (digits == 0) return std::nullopt;
    }
  }

  std::int64_t offset = 0;
  if (pos < s.size()) {
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      ++pos;
      auto oh = read_digits(s, pos, 2);
      if (!oh) return std::nullopt;
      int om = 0;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size()) {
        auto o2 = read_digits(s, pos, 2);
        if (!o2) return std::nullopt;
        om = *o2;
      }
      if (*oh > 23 || om > 59) return std::nullopt;
      offset = static_cast<std::int64_t>(*oh) * 3600 + om * 60;
      if (c == '+') offset = -offset;  // ahead of UTC, subtract to normalize
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  std::int64_t days = days_from_civil(*y, *mo, *d);
  return days * 86400 + hh * 3600 + mi * 60 + ss + offset;
}

Date date_of(UnixTime t) {
  return Date::from_serial(floor_div(t, 86400));
}

std::string format_timestamp(UnixTime t) {
  std::int64_t days = floor_div(t, 86400);
  std::int64_t rem = t - days * 86400;
  Date d = Date::from_serial(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02ld:%02ld:%02ldZ", d.year, d.month, d.day,
                static_cast<long>(rem / 3600), static_cast<long>((rem / 60) % 60),
                static_cast<long>(rem % 60));
  return buf;
}

std::string to_string(Granularity g) {
  return g == Granularity::monthly ? "monthly" : "biweekly";
}

std::optional<Granularity> parse_granularity(std::string_view s) {
  if (s == "monthly") return Granularity::monthly;
  if (s == "biweekly") return Granularity::biweekly;
  return std::nullopt;
}

bool TimeWindow::contains(UnixTime t) const {
  return start.serial() * 86400 <= t && t < end.serial() * 86400;
}

std::string TimeWindow::label() const {
  return granularity == Granularity::monthly ? start.month_label() : start.iso();
}

TimeWindow window_for(const Date& d, Granularity g, const Date& anchor) {
  if (g == Granularity::monthly) {
    Date s{d.year, d.month, 1};
    Date e = d.month == 12 ? Date{d.year + 1, 1, 1} : Date{d.year, d.month + 1, 1};
    return TimeWindow{s, e, g};
  }
  std::int64_t idx = floor_div(d.serial() - anchor.serial(), 14);
  Date s = Date::from_serial(anchor.serial() + idx * 14);
  Date e = Date::from_serial(s.serial() + 14);
  return TimeWindow{s, e, g};
}

TimeWindow window_for(UnixTime t, Granularity g, const Date& anchor) {
  return window_for(date_of(t), g, anchor);
}

std::int64_t window_gap(const TimeWindow& a, const TimeWindow& b) {
  if (a.granularity != b.granularity)
    throw std::invalid_argument("window_gap: mixed granularities");
  if (a.granularity == Granularity::monthly)
    return b.start.month_index() - a.start.month_index();
  return (b.start.serial() - a.start.serial()) / 14;
}

TimeWindow next_window(const TimeWindow& w) {
  if (w.granularity == Granularity::monthly) {
    Date s = w.end;
    Date e = s.month == 12 ? Date{s.year + 1, 1, 1} : Date{s.year, s.month + 1, 1};
    return TimeWindow{s, e, w.granularity};
  }
  return TimeWindow{w.end, Date::from_serial(w.end.serial() + 14), w.granularity};
}

Date default_anchor() { return Date{2015, 1, 4}; }

}  // namespace campnet

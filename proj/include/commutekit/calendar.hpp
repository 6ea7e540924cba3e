#pragma once

#include <cstdint>
#include <string>

namespace commutekit {

// Civil-calendar helpers. The study timezone is a fixed UTC offset; hour-of-day
// weights and weekday rules are all phrased in that local clock.

struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12

  int days_in_month() const;
  bool operator==(const YearMonth&) const = default;

  static YearMonth parse(const std::string& ym);  // "YYYY-MM"
  std::string str() const;
};

// days since 1970-01-01 for a civil date (proleptic Gregorian)
std::int64_t days_from_civil(int y, int m, int d);
void civil_from_days(std::int64_t z, int& y, int& m, int& d);

// 0 = Monday ... 6 = Sunday
int weekday_from_days(std::int64_t days);
inline int weekday(int y, int m, int d) { return weekday_from_days(days_from_civil(y, m, d)); }

// Fixed-offset timezone: "UTC", "Z", "UTC+5", "UTC-03:30", "+02:00", "-04"
struct TzOffset {
  int seconds = 0;
  static TzOffset parse(const std::string& id);
};

// Local civil parts of an epoch instant under a fixed offset.
struct LocalParts {
  int year, month, day;  // civil date
  int hour, minute, second;
  int weekday;  // 0 = Monday
};
LocalParts local_parts(std::int64_t epoch_s, TzOffset tz);

// ISO-8601 timestamp, second precision: "YYYY-MM-DDTHH:MM:SS" optionally
// followed by "Z" or "+HH:MM"/"-HH:MM". Naive stamps are interpreted in
// `naive_tz`. Returns epoch seconds UTC; throws std::invalid_argument on
// malformed input.
std::int64_t parse_timestamp(const std::string& s, TzOffset naive_tz);

// seconds since local midnight from "HH:MM" or "HH:MM:SS" (hours may exceed 24)
int parse_hms(const std::string& s);
std::string format_hms(int seconds);

}  // namespace commutekit

#include "commutekit/calendar.hpp"

#include <cstdio>
#include <stdexcept>

#include "commutekit/util.hpp"

namespace commutekit {

namespace {

bool parse_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

int YearMonth::days_in_month() const {
  static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return d[month - 1];
}

YearMonth YearMonth::parse(const std::string& ym) {
  YearMonth out;
  if (ym.size() != 7 || ym[4] != '-' || !parse_int(ym, 0, 4, out.year) ||
      !parse_int(ym, 5, 2, out.month) || out.month < 1 || out.month > 12)
    throw ConfigError("invalid year-month (expected YYYY-MM): '" + ym + "'");
  return out;
}

std::string YearMonth::str() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

// Howard Hinnant's days_from_civil / civil_from_days
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
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

int weekday_from_days(std::int64_t days) {
  // 1970-01-01 was a Thursday (= 3 with Monday = 0)
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

TzOffset TzOffset::parse(const std::string& id) {
  std::string s = trim(id);
  if (s.empty()) throw ConfigError("empty timezone id");
  if (s == "Z" || s == "UTC" || s == "utc") return {0};
  if (s.rfind("UTC", 0) == 0 || s.rfind("utc", 0) == 0) s = s.substr(3);
  if (s.empty()) return {0};
  int sign = 1;
  std::size_t i = 0;
  if (s[0] == '+') {
    i = 1;
  } else if (s[0] == '-') {
    sign = -1;
    i = 1;
  }
  int hours = 0, minutes = 0;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9' && digits < 2) {
    hours = hours * 10 + (s[i] - '0');
    ++i;
    ++digits;
  }
  if (digits == 0) throw ConfigError("unsupported timezone id (fixed offsets only): '" + id + "'");
  if (i < s.size()) {
    if (s[i] != ':') throw ConfigError("unsupported timezone id: '" + id + "'");
    ++i;
    if (!parse_int(s, i, 2, minutes) || i + 2 != s.size())
      throw ConfigError("unsupported timezone id: '" + id + "'");
  }
  if (hours > 18 || minutes > 59) throw ConfigError("timezone offset out of range: '" + id + "'");
  return {sign * (hours * 3600 + minutes * 60)};
}

LocalParts local_parts(std::int64_t epoch_s, TzOffset tz) {
  const std::int64_t local = epoch_s + tz.seconds;
  std::int64_t days = local / 86400;
  std::int64_t sod = local % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  LocalParts p{};
  civil_from_days(days, p.year, p.month, p.day);
  p.hour = static_cast<int>(sod / 3600);
  p.minute = static_cast<int>((sod % 3600) / 60);
  p.second = static_cast<int>(sod % 60);
  p.weekday = weekday_from_days(days);
  return p;
}

std::int64_t parse_timestamp(const std::string& s, TzOffset naive_tz) {
  // YYYY-MM-DDTHH:MM:SS[Z|+HH:MM|-HH:MM]
  int y, mo, d, h, mi, se;
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':' || !parse_int(s, 0, 4, y) || !parse_int(s, 5, 2, mo) ||
      !parse_int(s, 8, 2, d) || !parse_int(s, 11, 2, h) || !parse_int(s, 14, 2, mi) ||
      !parse_int(s, 17, 2, se))
    throw std::invalid_argument("malformed timestamp: '" + s + "'");
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
    throw std::invalid_argument("timestamp fields out of range: '" + s + "'");
  int offset = naive_tz.seconds;
  if (s.size() > 19) {
    const std::string suffix = s.substr(19);
    if (suffix == "Z") {
      offset = 0;
    } else if ((suffix[0] == '+' || suffix[0] == '-') && suffix.size() == 6 && suffix[3] == ':') {
      int oh, om;
      if (!parse_int(suffix, 1, 2, oh) || !parse_int(suffix, 4, 2, om))
        throw std::invalid_argument("malformed timestamp offset: '" + s + "'");
      offset = (suffix[0] == '-' ? -1 : 1) * (oh * 3600 + om * 60);
    } else {
      throw std::invalid_argument("malformed timestamp offset: '" + s + "'");
    }
  }
  const std::int64_t local = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
  return local - offset;
}

int parse_hms(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2 && parts.size() != 3)
    throw std::invalid_argument("malformed time of day: '" + s + "'");
  int h, m, sec = 0;
  auto num = [&](const std::string& t) {
    const std::string u = trim(t);
    if (u.empty() || u.size() > 2) throw std::invalid_argument("malformed time of day: '" + s + "'");
    int v = 0;
    for (char c : u) {
      if (c < '0' || c > '9') throw std::invalid_argument("malformed time of day: '" + s + "'");
      v = v * 10 + (c - '0');
    }
    return v;
  };
  h = num(parts[0]);
  m = num(parts[1]);
  if (parts.size() == 3) sec = num(parts[2]);
  if (m > 59 || sec > 59) throw std::invalid_argument("time of day out of range: '" + s + "'");
  return h * 3600 + m * 60 + sec;
}

std::string format_hms(int seconds) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds / 3600, (seconds % 3600) / 60,
                seconds % 60);
  return buf;
}

}  // namespace commutekit

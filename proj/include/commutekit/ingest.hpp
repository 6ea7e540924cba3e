#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "commutekit/calendar.hpp"

namespace commutekit {

// One billable mobile-network record.
struct Event {
  std::string user_id;
  std::string bts_id;
  std::int64_t epoch_s = 0;  // instant, UTC
};

struct TowerRegistry {
  // bts_id -> (lon, lat), WGS84 degrees
  std::map<std::string, std::pair<double, double>> towers;

  static TowerRegistry load(const std::string& bts_csv);
  bool contains(const std::string& id) const { return towers.count(id) != 0; }
};

// Per-user connection counts binned by (tower, day-of-month, hour-of-day) in
// the study timezone. Keys iterate in sorted order so serialization is
// byte-stable.
struct HourlyCounts {
  // user -> bts -> (day * 24 + hour) -> count; day is 1-based
  using CellMap = std::map<int, std::uint32_t>;
  std::map<std::string, std::map<std::string, CellMap>> by_user;
  std::uint64_t total = 0;

  void add(const std::string& user, const std::string& bts, int day, int hour,
           std::uint32_t n = 1);
  std::uint64_t user_total(const std::string& user) const;

  void save_csv(const std::string& path) const;
  static HourlyCounts load_csv(const std::string& path);
};

struct ParseReport {
  std::vector<Event> events;
  std::uint64_t rows_total = 0;
  std::map<std::string, std::uint64_t> dropped;  // reason -> count
  std::vector<int> malformed_lines;              // capped at 100 entries
};

// Reads events.csv (header user_id,timestamp,bts_id), keeping rows whose tower
// is registered and whose timestamp falls inside `month` in timezone `tz`.
// Drop reasons: malformed_row, unknown_tower, outside_month.
ParseReport parse_events(const std::string& path, const TowerRegistry& registry, YearMonth month,
                         TzOffset tz, bool naive_timestamps);

HourlyCounts bin_hourly(const std::vector<Event>& events, TzOffset tz);

// Active iff total events / calendar days in month > 2, strictly.
std::set<std::string> filter_active_users(const HourlyCounts& counts, YearMonth month);

}  // namespace commutekit

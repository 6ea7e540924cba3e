#include "commutekit/ingest.hpp"

#include <charconv>

#include "commutekit/csv.hpp"
#include "commutekit/util.hpp"

namespace commutekit {

TowerRegistry TowerRegistry::load(const std::string& bts_csv) {
  TowerRegistry reg;
  CsvReader in(bts_csv);
  in.require({"bts_id", "lon", "lat"});
  std::vector<std::string> row;
  while (in.next(row)) {
    double lon, lat;
    auto r1 = std::from_chars(row[1].data(), row[1].data() + row[1].size(), lon);
    auto r2 = std::from_chars(row[2].data(), row[2].data() + row[2].size(), lat);
    if (r1.ec != std::errc() || r2.ec != std::errc() || !std::isfinite(lon) || !std::isfinite(lat))
      throw std::runtime_error(bts_csv + ":" + std::to_string(in.line_number()) +
                               ": bad coordinates");
    if (!reg.towers.emplace(row[0], std::make_pair(lon, lat)).second)
      throw std::runtime_error(bts_csv + ": duplicate bts_id '" + row[0] + "'");
  }
  return reg;
}

void HourlyCounts::add(const std::string& user, const std::string& bts, int day, int hour,
                       std::uint32_t n) {
  by_user[user][bts][day * 24 + hour] += n;
  total += n;
}

std::uint64_t HourlyCounts::user_total(const std::string& user) const {
  const auto it = by_user.find(user);
  if (it == by_user.end()) return 0;
  std::uint64_t t = 0;
  for (const auto& [bts, cells] : it->second)
    for (const auto& [key, n] : cells) t += n;
  return t;
}

void HourlyCounts::save_csv(const std::string& path) const {
  CsvWriter out(path, {"user_id", "bts_id", "day", "hour", "count"});
  for (const auto& [user, towers] : by_user)
    for (const auto& [bts, cells] : towers)
      for (const auto& [key, n] : cells)
        out.row({user, bts, std::to_string(key / 24), std::to_string(key % 24),
                 std::to_string(n)});
  out.close();
}

HourlyCounts HourlyCounts::load_csv(const std::string& path) {
  HourlyCounts counts;
  CsvReader in(path);
  in.require({"user_id", "bts_id", "day", "hour", "count"});
  std::vector<std::string> row;
  while (in.next(row))
    counts.add(row[0], row[1], std::stoi(row[2]), std::stoi(row[3]),
               static_cast<std::uint32_t>(std::stoul(row[4])));
  return counts;
}

ParseReport parse_events(const std::string& path, const TowerRegistry& registry, YearMonth month,
                         TzOffset tz, bool naive_timestamps) {
  ParseReport rep;
  CsvReader in(path);
  in.require({"user_id", "timestamp", "bts_id"});
  const TzOffset naive_tz = naive_timestamps ? tz : TzOffset{0};
  std::vector<std::string> row;
  while (in.next(row)) {
    ++rep.rows_total;
    if (row[0].empty() || row[2].empty()) {
      ++rep.dropped["malformed_row"];
      if (rep.malformed_lines.size() < 100) rep.malformed_lines.push_back(in.line_number());
      continue;
    }
    std::int64_t epoch;
    try {
      epoch = parse_timestamp(row[1], naive_tz);
    } catch (const std::invalid_argument&) {
      ++rep.dropped["malformed_row"];
      if (rep.malformed_lines.size() < 100) rep.malformed_lines.push_back(in.line_number());
      continue;
    }
    if (!registry.contains(row[2])) {
      ++rep.dropped["unknown_tower"];
      continue;
    }
    const LocalParts lp = local_parts(epoch, tz);
    if (lp.year != month.year || lp.month != month.month) {
      ++rep.dropped["outside_month"];
      continue;
    }
    rep.events.push_back(Event{row[0], row[2], epoch});
  }
  return rep;
}

HourlyCounts bin_hourly(const std::vector<Event>& events, TzOffset tz) {
  HourlyCounts counts;
  for (const auto& e : events) {
    const LocalParts lp = local_parts(e.epoch_s, tz);
    counts.add(e.user_id, e.bts_id, lp.day, lp.hour);
  }
  return counts;
}

std::set<std::string> filter_active_users(const HourlyCounts& counts, YearMonth month) {
  std::set<std::string> active;
  const std::uint64_t days = static_cast<std::uint64_t>(month.days_in_month());
  for (const auto& [user, towers] : counts.by_user) {
    std::uint64_t t = 0;
    for (const auto& [bts, cells] : towers)
      for (const auto& [key, n] : cells) t += n;
    if (t > 2 * days) active.insert(user);  // strictly more than two signals per day
  }
  return active;
}

}  // namespace commutekit

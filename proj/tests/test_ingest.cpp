#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "commutekit/ingest.hpp"
#include "commutekit/util.hpp"

using namespace commutekit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ck_ingest_" + std::to_string(mix64(reinterpret_cast<std::uintptr_t>(this))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const std::string p = (path / name).string();
    write_file(p, content);
    return p;
  }
};

TowerRegistry small_registry(TempDir& dir) {
  return TowerRegistry::load(
      dir.file("bts.csv", "bts_id,lon,lat\nb1,0.0,0.0\nb7,0.01,0.01\n"));
}

}  // namespace

TEST_CASE("parse keeps valid rows and maps fields") {
  TempDir dir;
  const auto reg = small_registry(dir);
  const auto rep = parse_events(dir.file("events.csv",
                                         "user_id,timestamp,bts_id\n"
                                         "u1,2023-03-05T02:10:00,b7\n"),
                                reg, YearMonth::parse("2023-03"), TzOffset{0}, true);
  REQUIRE(rep.events.size() == 1);
  CHECK(rep.events[0].user_id == "u1");
  CHECK(rep.events[0].bts_id == "b7");
  CHECK(local_parts(rep.events[0].epoch_s, TzOffset{0}).hour == 2);
}

TEST_CASE("unknown towers are dropped and counted") {
  TempDir dir;
  const auto reg = small_registry(dir);
  const auto rep = parse_events(dir.file("events.csv",
                                         "user_id,timestamp,bts_id\n"
                                         "u1,2023-03-05T02:10:00,zz\n"
                                         "u1,2023-03-05T03:10:00,b1\n"),
                                reg, YearMonth::parse("2023-03"), TzOffset{0}, true);
  CHECK(rep.events.size() == 1);
  CHECK(rep.dropped.at("unknown_tower") == 1);
}

TEST_CASE("rows outside the study month are dropped") {
  TempDir dir;
  const auto reg = small_registry(dir);
  const auto rep = parse_events(dir.file("events.csv",
                                         "user_id,timestamp,bts_id\n"
                                         "u1,2023-02-28T23:59:59,b1\n"
                                         "u1,2023-04-01T00:00:00,b1\n"
                                         "u1,2023-03-01T00:00:00,b1\n"),
                                reg, YearMonth::parse("2023-03"), TzOffset{0}, true);
  CHECK(rep.events.size() == 1);
  CHECK(rep.dropped.at("outside_month") == 2);
}

TEST_CASE("malformed rows are counted with line numbers") {
  TempDir dir;
  const auto reg = small_registry(dir);
  const auto rep = parse_events(dir.file("events.csv",
                                         "user_id,timestamp,bts_id\n"
                                         "u1,not-a-time,b1\n"
                                         "u1,2023-03-05T02:10:00,b1\n"),
                                reg, YearMonth::parse("2023-03"), TzOffset{0}, true);
  CHECK(rep.events.size() == 1);
  CHECK(rep.dropped.at("malformed_row") == 1);
  REQUIRE(rep.malformed_lines.size() == 1);
  CHECK(rep.malformed_lines[0] == 2);
}

TEST_CASE("unreadable file is fatal") {
  TowerRegistry reg;
  CHECK_THROWS(parse_events("/nonexistent/events.csv", reg, YearMonth::parse("2023-03"),
                            TzOffset{0}, true));
}

TEST_CASE("corrupted rows: retained count matches a line-by-line recount") {
  TempDir dir;
  const auto reg = small_registry(dir);
  CounterRng rng(2024, 11);
  std::string content = "user_id,timestamp,bts_id\n";
  std::size_t expected_clean = 0;
  for (int i = 0; i < 10000; ++i) {
    const int day = 1 + static_cast<int>(rng.below(31));
    const int hour = static_cast<int>(rng.below(24));
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "2023-03-%02dT%02d:%02d:00", day, hour,
                  static_cast<int>(rng.below(60)));
    const bool corrupt = rng.uniform() < 0.03;
    if (corrupt) {
      content += "u" + std::to_string(rng.below(500)) + ",garbage,b1\n";
    } else {
      content += "u" + std::to_string(rng.below(500)) + "," + stamp +
                 (rng.below(2) ? ",b1\n" : ",b7\n");
      ++expected_clean;
    }
  }
  const std::string path = dir.file("events.csv", content);
  const auto rep = parse_events(path, reg, YearMonth::parse("2023-03"), TzOffset{0}, true);
  CHECK(rep.events.size() == expected_clean);
  CHECK(rep.rows_total == 10000);

  // conservation: hourly bins hold exactly the retained events
  const auto counts = bin_hourly(rep.events, TzOffset{0});
  CHECK(counts.total == expected_clean);
  std::uint64_t cell_sum = 0;
  for (const auto& [user, towers] : counts.by_user)
    for (const auto& [bts, cells] : towers)
      for (const auto& [key, n] : cells) cell_sum += n;
  CHECK(cell_sum == expected_clean);
}

TEST_CASE("binning floors to the hour and preserves totals") {
  std::vector<Event> events{{"u1", "b1", parse_timestamp("2023-03-08T23:59:59", TzOffset{0})}};
  const auto counts = bin_hourly(events, TzOffset{0});
  CHECK(counts.by_user.at("u1").at("b1").at(8 * 24 + 23) == 1);
  CHECK(bin_hourly({}, TzOffset{0}).total == 0);
}

TEST_CASE("active-user filter: strictly more than two signals per day") {
  const YearMonth march = YearMonth::parse("2023-03");
  HourlyCounts counts;
  for (int i = 0; i < 63; ++i) counts.add("u63", "b1", 1 + i % 28, i % 24);
  for (int i = 0; i < 62; ++i) counts.add("u62", "b1", 1 + i % 28, i % 24);
  const auto active = filter_active_users(counts, march);
  CHECK(active.count("u63") == 1);
  CHECK(active.count("u62") == 0);
}

TEST_CASE("active-user filter matches per-user recount and is monotone") {
  const YearMonth march = YearMonth::parse("2023-03");
  CounterRng rng(7, 3);
  HourlyCounts counts;
  std::map<std::string, std::uint64_t> totals;
  for (int u = 0; u < 500; ++u) {
    const std::string user = "u" + std::to_string(u);
    const int n = static_cast<int>(rng.below(140));
    for (int e = 0; e < n; ++e)
      counts.add(user, "b" + std::to_string(rng.below(5)), 1 + static_cast<int>(rng.below(31)),
                 static_cast<int>(rng.below(24)));
    totals[user] = n;
  }
  const auto active = filter_active_users(counts, march);
  for (const auto& [user, n] : totals) CHECK(active.count(user) == (n > 62 ? 1u : 0u));

  // monotone: adding events never removes a user
  HourlyCounts more = counts;
  for (const auto& [user, n] : totals) more.add(user, "b9", 15, 12, 10);
  const auto active2 = filter_active_users(more, march);
  for (const auto& u : active) CHECK(active2.count(u) == 1);
}

TEST_CASE("hourly counts serialize byte-identically") {
  TempDir dir;
  CounterRng rng(99, 1);
  HourlyCounts counts;
  for (int i = 0; i < 2000; ++i)
    counts.add("u" + std::to_string(rng.below(50)), "b" + std::to_string(rng.below(9)),
               1 + static_cast<int>(rng.below(31)), static_cast<int>(rng.below(24)));
  const std::string p1 = (dir.path / "a.csv").string();
  const std::string p2 = (dir.path / "b.csv").string();
  counts.save_csv(p1);
  const HourlyCounts reloaded = HourlyCounts::load_csv(p1);
  CHECK(reloaded.total == counts.total);
  reloaded.save_csv(p2);
  CHECK(read_file(p1) == read_file(p2));
  CHECK(sha256_file(p1) == sha256_file(p2));
}

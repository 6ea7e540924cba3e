#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "commutekit/anchors.hpp"
#include "commutekit/ingest.hpp"
#include "commutekit/router.hpp"
#include "commutekit/synth.hpp"
#include "commutekit/util.hpp"
#include "oracles.hpp"

using namespace commutekit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ck_synth_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CitySpec small_spec() {
  CitySpec spec;
  spec.seed = 42;
  spec.n_bts = 12;
  spec.n_users = 150;
  spec.n_routes = 2;
  spec.extent_km = 3.0;
  return spec;
}

std::vector<std::string> bundle_files(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).string());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("same spec twice gives identical bytes for every file") {
  TempDir a("det_a"), b("det_b");
  generate_city(small_spec(), a.path.string());
  generate_city(small_spec(), b.path.string());
  const auto fa = bundle_files(a.path);
  const auto fb = bundle_files(b.path);
  REQUIRE(fa == fb);
  REQUIRE(fa.size() >= 12);
  for (const auto& f : fa)
    CHECK(sha256_file((a.path / f).string()) == sha256_file((b.path / f).string()));

  // a different seed must actually change the city
  CitySpec other = small_spec();
  other.seed = 43;
  TempDir c("det_c");
  generate_city(other, c.path.string());
  CHECK(sha256_file((a.path / "events.csv").string()) !=
        sha256_file((c.path / "events.csv").string()));
}

TEST_CASE("generated events pass ingest with zero drops and all users active") {
  TempDir dir("ingest");
  const CitySpec spec = small_spec();
  generate_city(spec, dir.path.string());
  const auto reg = TowerRegistry::load((dir.path / "bts.csv").string());
  const auto rep = parse_events((dir.path / "events.csv").string(), reg,
                                YearMonth::parse(spec.month), TzOffset{0}, true);
  CHECK(rep.dropped.empty());
  const auto counts = bin_hourly(rep.events, TzOffset{0});
  CHECK(counts.total == rep.events.size());
  const auto active = filter_active_users(counts, YearMonth::parse(spec.month));
  CHECK(active.size() == static_cast<std::size_t>(spec.n_users));
}

TEST_CASE("noise-free anchors are recovered exactly") {
  TempDir dir("recover");
  const CitySpec spec = small_spec();
  generate_city(spec, dir.path.string());
  const auto truth = nlohmann::json::parse(read_file((dir.path / "truth.json").string()));

  const auto reg = TowerRegistry::load((dir.path / "bts.csv").string());
  const auto rep = parse_events((dir.path / "events.csv").string(), reg,
                                YearMonth::parse(spec.month), TzOffset{0}, true);
  const auto counts = bin_hourly(rep.events, TzOffset{0});
  const auto active = filter_active_users(counts, YearMonth::parse(spec.month));
  const auto res = detect_anchors(counts, active, YearMonth::parse(spec.month));

  CHECK(res.rejected.empty());
  REQUIRE(res.pairs.size() == static_cast<std::size_t>(spec.n_users));
  for (const auto& p : res.pairs) {
    const auto& t = truth.at("anchors").at(p.user_id);
    CHECK(p.home_bts == t.at("home").get<std::string>());
    CHECK(p.work_bts == t.at("work").get<std::string>());
  }
}

TEST_CASE("noisy anchors agree with the brute-force oracle") {
  TempDir dir("noisy");
  CitySpec spec = small_spec();
  spec.noise = 0.2;
  generate_city(spec, dir.path.string());
  const auto reg = TowerRegistry::load((dir.path / "bts.csv").string());
  const auto rep = parse_events((dir.path / "events.csv").string(), reg,
                                YearMonth::parse(spec.month), TzOffset{0}, true);
  CHECK(rep.dropped.empty());
  const auto counts = bin_hourly(rep.events, TzOffset{0});
  const auto active = filter_active_users(counts, YearMonth::parse(spec.month));
  const auto res = detect_anchors(counts, active, YearMonth::parse(spec.month));
  const auto oracle = oracles::brute_force_anchors(counts, active, YearMonth::parse(spec.month));
  REQUIRE(res.pairs.size() == oracle.pairs.size());
  for (const auto& p : res.pairs) {
    const auto it = oracle.pairs.find(p.user_id);
    REQUIRE(it != oracle.pairs.end());
    CHECK(p.home_bts == it->second.first);
    CHECK(p.work_bts == it->second.second);
  }
}

TEST_CASE("generated gtfs and streets load and route") {
  TempDir dir("net");
  const CitySpec spec = small_spec();
  generate_city(spec, dir.path.string());
  const Projection proj = Projection::at(0.0, 0.0);
  TimetableNetwork tt = load_gtfs((dir.path / "gtfs").string(), proj, "wednesday");
  CHECK(tt.n_gtfs_routes == spec.n_routes);
  CHECK(!tt.routes.empty());
  WalkGraph walk = WalkGraph::load((dir.path / "streets").string(), proj);
  CHECK(!walk.edges.empty());
  const Network net(std::move(tt), std::move(walk), {});
  const auto t = shortest_time_minutes(net, {-1200, -900}, {1200, 900});
  REQUIRE(t.has_value());
  CHECK(*t > 0.0);
  // weekend service day: no transit anywhere, but walking still works
  TimetableNetwork sunday = load_gtfs((dir.path / "gtfs").string(), proj, "sunday");
  int trips = 0;
  for (const auto& r : sunday.routes) trips += r.n_trips;
  CHECK(trips == 0);
}

#include "commutekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "commutekit/calendar.hpp"
#include "commutekit/csv.hpp"
#include "commutekit/geo.hpp"
#include "commutekit/geometry.hpp"
#include "commutekit/util.hpp"

namespace commutekit {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string id_of(const char* prefix, int i, int width = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, i);
  return buf;
}

double clamp01_100(double v) { return std::min(100.0, std::max(0.0, v)); }

}  // namespace

void generate_city(const CitySpec& spec, const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/streets");
  fs::create_directories(out_dir + "/gtfs");

  const double E = spec.extent_km * 1000.0;
  const Projection proj = Projection::at(0.0, 0.0);
  const Ring boundary{{-E / 2, -E / 2}, {E / 2, -E / 2}, {E / 2, E / 2}, {-E / 2, E / 2}};

  // boundary.geojson
  {
    json coords = json::array();
    json outer = json::array();
    for (const auto& p : boundary) {
      const auto [lon, lat] = proj.inverse(p);
      outer.push_back({lon, lat});
    }
    const auto [lon0, lat0] = proj.inverse(boundary[0]);
    outer.push_back({lon0, lat0});
    coords.push_back(outer);
    const json g = {{"type", "Polygon"}, {"coordinates", coords}};
    write_file(out_dir + "/boundary.geojson", g.dump() + "\n");
  }

  // towers, kept 5% off the edge and 50 m apart
  std::vector<std::string> bts_ids;
  std::vector<Vec2> bts_pos;
  {
    CounterRng rng(spec.seed, 1);
    CsvWriter out(out_dir + "/bts.csv", {"bts_id", "lon", "lat"});
    while (static_cast<int>(bts_ids.size()) < spec.n_bts) {
      const Vec2 p{(rng.uniform() - 0.5) * 0.9 * E, (rng.uniform() - 0.5) * 0.9 * E};
      bool ok = true;
      for (const auto& q : bts_pos)
        if (distance(p, q) < 50.0) {
          ok = false;
          break;
        }
      if (!ok) continue;
      const std::string id = id_of("b", static_cast<int>(bts_ids.size()), 3);
      bts_ids.push_back(id);
      bts_pos.push_back(p);
      const auto [lon, lat] = proj.inverse(p);
      out.row({id, fmt_double(lon), fmt_double(lat)});
    }
    out.close();
  }

  // street grid
  {
    const double s = spec.street_spacing_m;
    const int n = static_cast<int>(std::floor(E / s)) + 1;
    CsvWriter nodes(out_dir + "/streets/nodes.csv", {"node_id", "lon", "lat"});
    CsvWriter edges(out_dir + "/streets/edges.csv", {"from_id", "to_id", "length_m"});
    auto node_id = [](int ix, int iy) {
      return "n" + std::to_string(ix) + "_" + std::to_string(iy);
    };
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const Vec2 p{-E / 2 + ix * s, -E / 2 + iy * s};
        const auto [lon, lat] = proj.inverse(p);
        nodes.row({node_id(ix, iy), fmt_double(lon), fmt_double(lat)});
        if (ix + 1 < n) edges.row({node_id(ix, iy), node_id(ix + 1, iy), fmt_double(s)});
        if (iy + 1 < n) edges.row({node_id(ix, iy), node_id(ix, iy + 1), fmt_double(s)});
      }
    nodes.close();
    edges.close();
  }

  // transit: alternating horizontal/vertical lines, both directions,
  // departures every 10 minutes across the morning
  {
    CsvWriter stops(out_dir + "/gtfs/stops.txt", {"stop_id", "stop_lat", "stop_lon"});
    CsvWriter routes(out_dir + "/gtfs/routes.txt", {"route_id"});
    CsvWriter trips(out_dir + "/gtfs/trips.txt", {"route_id", "trip_id", "service_id"});
    CsvWriter stop_times(out_dir + "/gtfs/stop_times.txt",
                         {"trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"});
    CsvWriter calendar(out_dir + "/gtfs/calendar.txt",
                       {"service_id", "monday", "tuesday", "wednesday", "thursday", "friday",
                        "saturday", "sunday"});
    calendar.row({"wk", "1", "1", "1", "1", "1", "0", "0"});
    calendar.close();

    const double stop_gap = 800.0;
    const int n_stops_line = std::max(2, static_cast<int>(std::floor((E - 800.0) / stop_gap)) + 1);
    const int n_h = (spec.n_routes + 1) / 2, n_v = spec.n_routes / 2;
    const int ride_s = static_cast<int>(std::lround(stop_gap / (25.0 / 3.6)));  // 25 km/h
    const int dwell_s = 15;

    for (int j = 0; j < spec.n_routes; ++j) {
      const std::string rid = "r" + std::to_string(j);
      routes.row({rid});
      const bool horizontal = (j % 2) == 0;
      const int slot = j / 2;
      const double offset =
          -E / 2 + (slot + 1) * E / ((horizontal ? n_h : n_v) + 1);
      std::vector<std::string> stop_ids(n_stops_line);
      for (int k = 0; k < n_stops_line; ++k) {
        const double along = -E / 2 + 400.0 + k * stop_gap;
        const Vec2 p = horizontal ? Vec2{along, offset} : Vec2{offset, along};
        stop_ids[k] = "s" + std::to_string(j) + "_" + std::to_string(k);
        const auto [lon, lat] = proj.inverse(p);
        stops.row({stop_ids[k], fmt_double(lat), fmt_double(lon)});
      }
      for (int dir = 0; dir < 2; ++dir) {
        for (int t = 0, dep0 = 6 * 3600 + 1800; dep0 <= 9 * 3600 + 1800; dep0 += 600, ++t) {
          const std::string tid = rid + (dir == 0 ? "_f_" : "_b_") + std::to_string(t);
          trips.row({rid, tid, "wk"});
          for (int k = 0; k < n_stops_line; ++k) {
            const int idx = dir == 0 ? k : n_stops_line - 1 - k;
            const int arr = dep0 + k * (ride_s + dwell_s);
            const int dep = k + 1 < n_stops_line ? arr + dwell_s : arr;
            stop_times.row({tid, format_hms(arr), format_hms(dep), stop_ids[idx],
                            std::to_string(k + 1)});
          }
        }
      }
    }
    stops.close();
    routes.close();
    trips.close();
    stop_times.close();
  }

  // users with planted anchors and their events
  const YearMonth ym = YearMonth::parse(spec.month);
  json truth_users = json::object();
  {
    CounterRng rng_users(spec.seed, 2);
    CounterRng rng_events(spec.seed, 3);
    CsvWriter events(out_dir + "/events.csv", {"user_id", "timestamp", "bts_id"});
    const int days = ym.days_in_month();
    static const int night_hours[8] = {23, 0, 1, 2, 3, 4, 5, 6};
    char stamp[32];
    for (int u = 0; u < spec.n_users; ++u) {
      const std::string uid = id_of("u", u, 5);
      const int home = static_cast<int>(rng_users.below(bts_ids.size()));
      int work = home;
      while (work == home) work = static_cast<int>(rng_users.below(bts_ids.size()));
      truth_users[uid] = {{"home", bts_ids[home]}, {"work", bts_ids[work]}};

      auto emit = [&](int day, int hour, int planted_bts) {
        int bts = planted_bts;
        if (spec.noise > 0 && rng_events.uniform() < spec.noise)
          bts = static_cast<int>(rng_events.below(bts_ids.size()));
        const int minute = static_cast<int>(rng_events.below(60));
        const int second = static_cast<int>(rng_events.below(60));
        std::snprintf(stamp, sizeof stamp, "%04d-%02d-%02dT%02d:%02d:%02d", ym.year, ym.month, day,
                      hour, minute, second);
        events.row({uid, stamp, bts_ids[bts]});
      };

      for (int day = 1; day <= days; ++day) {
        const int n_night = 2 + static_cast<int>(rng_events.below(2));
        for (int e = 0; e < n_night; ++e)
          emit(day, night_hours[rng_events.below(8)], home);
        if (weekday(ym.year, ym.month, day) < 5)
          for (int e = 0; e < 3; ++e)
            emit(day, 9 + static_cast<int>(rng_events.below(9)), work);
      }
    }
    events.close();
  }

  // SMI and demographics on the analysis grid: an east-west divide so the
  // cluster-composition tests have known sign structure
  {
    const auto hexes = build_hex_grid(boundary, spec.hex_edge_m);
    CounterRng rng_smi(spec.seed, 4);
    CounterRng rng_demo(spec.seed, 5);
    CsvWriter smi(out_dir + "/smi.csv", {"hex_id", "smi"});
    CsvWriter demo(out_dir + "/demographics.csv",
                   {"hex_id", "gender_ratio", "immigrant", "retired", "minor", "indigenous"});
    for (const auto& h : hexes) {
      const std::string id = hex_id(h.q, h.r);
      const double east = h.center.x / (E / 2);  // -1 .. 1
      const double s = clamp01_100(50.0 + 35.0 * east + 4.0 * rng_smi.normal());
      smi.row({id, fmt_double(s)});
      const bool adv = h.center.x > 0;
      demo.row({id,
                fmt_double(clamp01_100(50.0 + (adv ? 3.5 : -0.5) + 1.5 * rng_demo.normal())),
                fmt_double(clamp01_100((adv ? 12.0 : 7.0) + 2.0 * rng_demo.normal())),
                fmt_double(clamp01_100(12.0 + 3.0 * rng_demo.normal())),
                fmt_double(clamp01_100(20.0 + 3.0 * rng_demo.normal())),
                fmt_double(clamp01_100((adv ? 4.0 : 12.0) + 2.0 * rng_demo.normal()))});
    }
    smi.close();
    demo.close();
  }

  // ground truth for oracle tests
  {
    json truth = {{"seed", spec.seed},
                  {"month", spec.month},
                  {"noise", spec.noise},
                  {"n_bts", spec.n_bts},
                  {"n_users", spec.n_users},
                  {"advantaged_region", "x > 0 (east half)"},
                  {"planted_effects",
                   {{"smi", "rises west to east"},
                    {"gender_ratio", "higher in the east"},
                    {"immigrant", "higher in the east"},
                    {"retired", "no regional effect"},
                    {"minor", "no regional effect"},
                    {"indigenous", "higher in the west"}}},
                  {"anchors", truth_users}};
    write_file(out_dir + "/truth.json", truth.dump(1) + "\n");
  }

  // ready-to-run config; relative paths resolve against the config location
  {
    json cfg = {
        {"study", {{"month", spec.month}, {"timezone", spec.timezone}}},
        {"ingest", {{"naive_timestamps", true}}},
        {"inputs",
         {{"events", "events.csv"},
          {"bts", "bts.csv"},
          {"boundary", "boundary.geojson"},
          {"gtfs_dir", "gtfs"},
          {"streets_dir", "streets"},
          {"smi", "smi.csv"},
          {"demographics", "demographics.csv"}}},
        {"geo", {{"hex_edge_m", spec.hex_edge_m}, {"tie_break", "min_bts_id"}}},
        {"router",
         {{"walk_speed_kmh", 5.0},
          {"max_access_walk_m", 1000.0},
          {"min_transfer_s", 0.0},
          {"window_start", "07:00"},
          {"window_end", "09:00"},
          {"step_s", 600},
          {"service_weekday", "wednesday"}}},
        {"access", {{"threshold_min", "auto"}}},
        {"lisa", {{"permutations", 999}, {"alpha", 0.05}, {"seed", spec.seed}}},
        {"stats", {{"l2", 1e-4}, {"tol", 1e-8}, {"max_iter", 200}}},
        {"threads", 0},
        {"seed", spec.seed},
        {"output", {{"dir", "out"}}},
    };
    write_file(out_dir + "/config.json", cfg.dump(1) + "\n");
  }
}

}  // namespace commutekit

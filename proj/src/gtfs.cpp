#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "commutekit/calendar.hpp"
#include "commutekit/csv.hpp"
#include "commutekit/router.hpp"
#include "commutekit/util.hpp"

namespace commutekit {

namespace {

int weekday_column(const std::string& name) {
  static const char* days[7] = {"monday", "tuesday", "wednesday", "thursday",
                                "friday", "saturday", "sunday"};
  for (int i = 0; i < 7; ++i)
    if (name == days[i]) return i;
  throw ConfigError("invalid service weekday: '" + name + "'");
}

struct RawTrip {
  std::string trip_id;
  std::vector<int> stops;
  std::vector<std::int32_t> arr, dep;
};

}  // namespace

WalkGraph WalkGraph::load(const std::string& streets_dir, const Projection& proj) {
  WalkGraph g;
  std::map<std::string, int> index;
  {
    CsvReader in(streets_dir + "/nodes.csv");
    in.require({"node_id", "lon", "lat"});
    std::vector<std::string> row;
    while (in.next(row)) {
      if (!index.emplace(row[0], static_cast<int>(g.node_ids.size())).second)
        throw std::runtime_error("duplicate street node id '" + row[0] + "'");
      g.node_ids.push_back(row[0]);
      g.node_pos.push_back(proj.project(std::stod(row[1]), std::stod(row[2])));
    }
  }
  {
    CsvReader in(streets_dir + "/edges.csv");
    in.require({"from_id", "to_id", "length_m"});
    std::vector<std::string> row;
    while (in.next(row)) {
      const auto a = index.find(row[0]);
      const auto b = index.find(row[1]);
      if (a == index.end() || b == index.end())
        throw std::runtime_error(streets_dir + "/edges.csv:" + std::to_string(in.line_number()) +
                                 ": edge references unknown node");
      const double len = std::stod(row[2]);
      if (!(len > 0))
        throw std::runtime_error(streets_dir + "/edges.csv:" + std::to_string(in.line_number()) +
                                 ": edge length must be positive");
      g.edges.push_back({a->second, b->second, len});
    }
  }
  return g;
}

TimetableNetwork load_gtfs(const std::string& gtfs_dir, const Projection& proj,
                           const std::string& service_weekday) {
  TimetableNetwork tt;
  const int wd = weekday_column(service_weekday);

  std::map<std::string, int> stop_index;
  {
    CsvReader in(gtfs_dir + "/stops.txt");
    in.require({"stop_id", "stop_lat", "stop_lon"});
    std::vector<std::string> row;
    while (in.next(row)) {
      if (!stop_index.emplace(row[0], static_cast<int>(tt.stop_ids.size())).second)
        throw std::runtime_error("gtfs: duplicate stop_id '" + row[0] + "'");
      tt.stop_ids.push_back(row[0]);
      tt.stop_pos.push_back(proj.project(std::stod(row[2]), std::stod(row[1])));
    }
  }

  std::set<std::string> route_ids;
  {
    CsvReader in(gtfs_dir + "/routes.txt");
    in.require({"route_id"});
    std::vector<std::string> row;
    while (in.next(row)) route_ids.insert(row[0]);
  }
  tt.n_gtfs_routes = static_cast<int>(route_ids.size());

  std::set<std::string> active_services;
  {
    CsvReader in(gtfs_dir + "/calendar.txt");
    in.require({"service_id", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
                "sunday"});
    std::vector<std::string> row;
    while (in.next(row))
      if (row[1 + wd] == "1") active_services.insert(row[0]);
  }

  // trips active on the service day
  std::map<std::string, std::string> trip_route;  // trip_id -> route_id, active only
  std::set<std::string> declared_trips;
  {
    CsvReader in(gtfs_dir + "/trips.txt");
    in.require({"route_id", "trip_id", "service_id"});
    std::vector<std::string> row;
    while (in.next(row)) {
      if (route_ids.find(row[0]) == route_ids.end())
        throw std::runtime_error("gtfs: trip '" + row[1] + "' references unknown route '" + row[0] +
                                 "'");
      if (!declared_trips.insert(row[1]).second)
        throw std::runtime_error("gtfs: duplicate trip_id '" + row[1] + "'");
      if (active_services.find(row[2]) == active_services.end()) continue;
      trip_route.emplace(row[1], row[0]);
    }
  }

  // stop_times, gathered per trip and ordered by stop_sequence
  std::map<std::string, std::vector<std::tuple<int, std::int32_t, std::int32_t, int>>> times;
  {
    CsvReader in(gtfs_dir + "/stop_times.txt");
    in.require({"trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"});
    std::vector<std::string> row;
    while (in.next(row)) {
      if (declared_trips.find(row[0]) == declared_trips.end())
        throw std::runtime_error("gtfs: stop_times references unknown trip '" + row[0] + "'");
      if (trip_route.find(row[0]) == trip_route.end()) continue;  // inactive service
      const auto st = stop_index.find(row[3]);
      if (st == stop_index.end())
        throw std::runtime_error("gtfs: stop_times references unknown stop '" + row[3] + "'");
      times[row[0]].emplace_back(std::stoi(row[4]), parse_hms(row[1]), parse_hms(row[2]),
                                 st->second);
    }
  }

  std::vector<RawTrip> raw;
  for (auto& [trip_id, seq] : times) {
    std::sort(seq.begin(), seq.end());
    RawTrip t;
    t.trip_id = trip_id;
    std::int32_t prev_dep = -1;
    for (const auto& [s, a, d, stop] : seq) {
      if (d < a)
        throw std::runtime_error("gtfs: trip '" + trip_id + "' departs before it arrives at stop " +
                                 tt.stop_ids[stop]);
      if (a < prev_dep)
        throw std::runtime_error("gtfs: trip '" + trip_id +
                                 "' has decreasing stop_times at stop " + tt.stop_ids[stop]);
      prev_dep = d;
      t.stops.push_back(stop);
      t.arr.push_back(a);
      t.dep.push_back(d);
    }
    if (t.stops.size() >= 2) raw.push_back(std::move(t));
  }

  // frequencies.txt expands template trips into explicit departures
  {
    std::ifstream probe(gtfs_dir + "/frequencies.txt");
    if (probe.good()) {
      probe.close();
      CsvReader in(gtfs_dir + "/frequencies.txt");
      in.require({"trip_id", "start_time", "end_time", "headway_secs"});
      std::vector<std::string> row;
      std::map<std::string, std::vector<std::tuple<int, int, int>>> freq;
      while (in.next(row))
        freq[row[0]].emplace_back(parse_hms(row[1]), parse_hms(row[2]), std::stoi(row[3]));
      std::vector<RawTrip> expanded;
      for (auto& t : raw) {
        const auto f = freq.find(t.trip_id);
        if (f == freq.end()) {
          expanded.push_back(std::move(t));
          continue;
        }
        for (const auto& [start, end, headway] : f->second) {
          if (headway <= 0)
            throw std::runtime_error("gtfs: non-positive headway for trip '" + t.trip_id + "'");
          const std::int32_t base = t.dep[0];
          for (int dep0 = start, k = 0; dep0 < end; dep0 += headway, ++k) {
            RawTrip copy = t;
            copy.trip_id = t.trip_id + "#" + std::to_string(k);
            const std::int32_t shift = dep0 - base;
            for (auto& v : copy.arr) v += shift;
            for (auto& v : copy.dep) v += shift;
            expanded.push_back(std::move(copy));
          }
        }
      }
      raw = std::move(expanded);
    }
  }
  tt.n_gtfs_trips_active = static_cast<int>(raw.size());

  // group by stop sequence, sort by first departure, split overtakers
  std::map<std::vector<int>, std::vector<const RawTrip*>> by_seq;
  for (const auto& t : raw) by_seq[t.stops].push_back(&t);
  for (auto& [stops, trips] : by_seq) {
    std::sort(trips.begin(), trips.end(), [](const RawTrip* a, const RawTrip* b) {
      if (a->dep[0] != b->dep[0]) return a->dep[0] < b->dep[0];
      return a->trip_id < b->trip_id;
    });
    std::vector<std::vector<const RawTrip*>> buckets;
    for (const RawTrip* t : trips) {
      bool placed = false;
      for (auto& bucket : buckets) {
        const RawTrip* last = bucket.back();
        bool dominated = true;
        for (std::size_t k = 0; k < stops.size(); ++k)
          if (t->arr[k] < last->arr[k] || t->dep[k] < last->dep[k]) {
            dominated = false;
            break;
          }
        if (dominated) {
          bucket.push_back(t);
          placed = true;
          break;
        }
      }
      if (!placed) buckets.push_back({t});
    }
    for (const auto& bucket : buckets) {
      TimetableNetwork::Route route;
      route.stops = stops;
      route.time_offset = tt.arr.size();
      route.n_trips = static_cast<int>(bucket.size());
      for (const RawTrip* t : bucket) {
        tt.arr.insert(tt.arr.end(), t->arr.begin(), t->arr.end());
        tt.dep.insert(tt.dep.end(), t->dep.begin(), t->dep.end());
      }
      tt.routes.push_back(std::move(route));
    }
  }

  tt.routes_at_stop.assign(tt.stop_ids.size(), {});
  for (std::size_t r = 0; r < tt.routes.size(); ++r)
    for (std::size_t k = 0; k < tt.routes[r].stops.size(); ++k)
      tt.routes_at_stop[tt.routes[r].stops[k]].emplace_back(static_cast<int>(r),
                                                            static_cast<int>(k));

  // optional transfers
  {
    std::ifstream probe(gtfs_dir + "/transfers.txt");
    if (probe.good()) {
      probe.close();
      CsvReader in(gtfs_dir + "/transfers.txt");
      in.require({"from_stop_id", "to_stop_id", "min_transfer_time"});
      std::vector<std::string> row;
      while (in.next(row)) {
        const auto a = stop_index.find(row[0]);
        const auto b = stop_index.find(row[1]);
        if (a == stop_index.end() || b == stop_index.end())
          throw std::runtime_error("gtfs: transfer references unknown stop");
        tt.transfers.push_back({a->second, b->second, static_cast<double>(std::stoi(row[2]))});
      }
    }
  }

  return tt;
}

}  // namespace commutekit

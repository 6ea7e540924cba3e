#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "commutekit/geo.hpp"
#include "commutekit/geometry.hpp"

namespace commutekit {

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct WalkGraph {
  std::vector<std::string> node_ids;
  std::vector<Vec2> node_pos;
  struct Edge {
    int from, to;
    double length_m;
  };
  std::vector<Edge> edges;  // undirected

  // streets dir holds nodes.csv (node_id,lon,lat) and edges.csv
  // (from_id,to_id,length_m)
  static WalkGraph load(const std::string& streets_dir, const Projection& proj);
};

// Validated, query-ready timetable. Internal routes group trips sharing an
// exact stop sequence; trips are departure-sorted and never overtake each
// other within a route (offenders are split off), so the earliest boardable
// trip can be found by binary search.
struct TimetableNetwork {
  std::vector<std::string> stop_ids;
  std::vector<Vec2> stop_pos;

  struct Route {
    std::vector<int> stops;       // stop indices along the route
    std::size_t time_offset = 0;  // into arr/dep arrays
    int n_trips = 0;
  };
  std::vector<Route> routes;
  std::vector<std::int32_t> arr;  // arrival seconds,  [time_offset + t*stops.size() + k]
  std::vector<std::int32_t> dep;  // departure seconds

  std::vector<std::vector<std::pair<int, int>>> routes_at_stop;  // stop -> (route, position)

  struct Transfer {
    int from_stop, to_stop;
    double seconds;
  };
  std::vector<Transfer> transfers;

  // load-time statistics, used by validation reports and tests
  int n_gtfs_routes = 0;
  int n_gtfs_trips_active = 0;  // trips on the selected service day, after frequency expansion

  std::int32_t arr_at(int route, int trip, int k) const {
    return arr[routes[route].time_offset + std::size_t(trip) * routes[route].stops.size() + k];
  }
  std::int32_t dep_at(int route, int trip, int k) const {
    return dep[routes[route].time_offset + std::size_t(trip) * routes[route].stops.size() + k];
  }
};

// Parses the GTFS subset (stops, routes, trips, stop_times, calendar, optional
// transfers and frequencies), keeps trips active on `service_weekday`
// ("monday".."sunday"), expands frequencies into explicit trips, and validates
// time monotonicity. Throws with the offending trip_id on bad feeds.
TimetableNetwork load_gtfs(const std::string& gtfs_dir, const Projection& proj,
                           const std::string& service_weekday);

struct RouterConfig {
  double walk_speed_kmh = 5.0;
  double max_access_walk_m = 1000.0;
  double min_transfer_s = 0.0;
  int window_start_s = 7 * 3600;
  int window_end_s = 9 * 3600;
  int step_s = 600;
  std::string service_weekday = "wednesday";

  double walk_speed_ms() const { return walk_speed_kmh / 3.6; }
};

// Immutable routing network shared read-only across query threads.
// Locations are stops [0, n_stops) followed by street nodes.
class Network {
 public:
  Network(TimetableNetwork tt, WalkGraph walk, RouterConfig cfg);

  const TimetableNetwork tt;
  const WalkGraph walk;
  const RouterConfig cfg;

  int n_stops() const { return static_cast<int>(tt.stop_ids.size()); }
  int n_locations() const { return n_locations_; }
  Vec2 location_pos(int loc) const {
    return loc < n_stops() ? tt.stop_pos[loc] : walk.node_pos[loc - n_stops()];
  }

  // walking adjacency (seconds) over locations: street edges, stop-street
  // access links within max_access_walk_m, and timetable transfer links
  struct Link {
    int to;
    double seconds;
  };
  const std::vector<std::size_t>& link_head() const { return head_; }
  const std::vector<Link>& links() const { return links_; }

  // all locations within max_access_walk_m of p, with straight-line walk seconds
  std::vector<std::pair<int, double>> access_links(Vec2 p) const;

 private:
  int n_locations_ = 0;
  std::vector<std::size_t> head_;
  std::vector<Link> links_;
};

// One-to-all earliest-arrival query state. Round-based: scan the routes
// serving improved stops, ride the earliest boardable trip, then propagate by
// walking (Dijkstra over the link graph); repeat until nothing improves.
class Raptor {
 public:
  explicit Raptor(const Network& net);

  // earliest arrival at every location when leaving `origin` at dep_s
  void run(Vec2 origin, double dep_s);
  const std::vector<double>& arrival() const { return arrival_; }

 private:
  void relax_walking(const std::vector<int>& seeds);

  const Network& net_;
  std::vector<double> arrival_;
  std::vector<int> marked_;           // stops improved since last scan
  std::vector<char> is_marked_;
  std::vector<int> route_from_;       // earliest marked position per route, -1 = untouched
  std::vector<int> touched_routes_;
  // walking Dijkstra scratch
  std::vector<std::pair<double, int>> heap_;
};

struct TravelTimeMatrix {
  std::vector<std::string> origin_ids;
  std::vector<std::string> dest_ids;
  std::vector<double> minutes;  // row-major origins x dests, kUnreachable sentinel

  double at(std::size_t i, std::size_t j) const { return minutes[i * dest_ids.size() + j]; }

  void save_csv(const std::string& path) const;
  static TravelTimeMatrix load_csv(const std::string& path);
};

// Minimum door-to-door time in minutes over sampled departures in the
// configured window, walking or walking+transit; nullopt when unreachable.
std::optional<double> shortest_time_minutes(const Network& net, Vec2 origin, Vec2 dest);

// Rows = hexes with user_share > 0, columns = hexes with opportunity_share >
// 0. One one-to-all run per (origin, departure) is shared by all columns.
// Rows are computed independently, so the result is identical for any thread
// count.
TravelTimeMatrix build_matrix(const Network& net, const HexGrid& grid, int threads);

}  // namespace commutekit

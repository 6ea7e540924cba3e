#include "commutekit/router.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "commutekit/csv.hpp"
#include "commutekit/util.hpp"

namespace commutekit {

Network::Network(TimetableNetwork tt_in, WalkGraph walk_in, RouterConfig cfg_in)
    : tt(std::move(tt_in)), walk(std::move(walk_in)), cfg(cfg_in) {
  const int S = n_stops();
  const int N = static_cast<int>(walk.node_ids.size());
  n_locations_ = S + N;
  const double v = cfg.walk_speed_ms();

  std::vector<std::vector<Link>> adj(n_locations_);
  for (const auto& e : walk.edges) {
    const double secs = e.length_m / v;
    adj[S + e.from].push_back({S + e.to, secs});
    adj[S + e.to].push_back({S + e.from, secs});
  }
  // stop <-> street access links
  for (int s = 0; s < S; ++s)
    for (int n = 0; n < N; ++n) {
      const double d = distance(tt.stop_pos[s], walk.node_pos[n]);
      if (d <= cfg.max_access_walk_m) {
        adj[s].push_back({S + n, d / v});
        adj[S + n].push_back({s, d / v});
      }
    }
  for (const auto& t : tt.transfers) adj[t.from_stop].push_back({t.to_stop, t.seconds});

  head_.assign(n_locations_ + 1, 0);
  for (int i = 0; i < n_locations_; ++i) head_[i + 1] = head_[i] + adj[i].size();
  links_.reserve(head_[n_locations_]);
  for (int i = 0; i < n_locations_; ++i)
    links_.insert(links_.end(), adj[i].begin(), adj[i].end());
}

std::vector<std::pair<int, double>> Network::access_links(Vec2 p) const {
  std::vector<std::pair<int, double>> out;
  const double v = cfg.walk_speed_ms();
  for (int loc = 0; loc < n_locations_; ++loc) {
    const double d = distance(p, location_pos(loc));
    if (d <= cfg.max_access_walk_m) out.emplace_back(loc, d / v);
  }
  return out;
}

Raptor::Raptor(const Network& net) : net_(net) {
  arrival_.assign(net.n_locations(), kUnreachable);
  is_marked_.assign(net.n_stops(), 0);
  route_from_.assign(net.tt.routes.size(), -1);
}

void Raptor::relax_walking(const std::vector<int>& seeds) {
  heap_.clear();
  for (int loc : seeds) heap_.emplace_back(arrival_[loc], loc);
  std::make_heap(heap_.begin(), heap_.end(), std::greater<>{});
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
    const auto [t, loc] = heap_.back();
    heap_.pop_back();
    if (t > arrival_[loc]) continue;  // stale entry
    const auto& head = net_.link_head();
    const auto& links = net_.links();
    for (std::size_t i = head[loc]; i < head[loc + 1]; ++i) {
      const double cand = t + links[i].seconds;
      if (cand < arrival_[links[i].to]) {
        arrival_[links[i].to] = cand;
        heap_.emplace_back(cand, links[i].to);
        std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
        if (links[i].to < net_.n_stops() && !is_marked_[links[i].to]) {
          is_marked_[links[i].to] = 1;
          marked_.push_back(links[i].to);
        }
      }
    }
  }
}

void Raptor::run(Vec2 origin, double dep_s) {
  std::fill(arrival_.begin(), arrival_.end(), kUnreachable);
  std::fill(is_marked_.begin(), is_marked_.end(), 0);
  marked_.clear();

  // initial walking from the origin point
  std::vector<int> seeds;
  for (const auto& [loc, secs] : net_.access_links(origin)) {
    if (dep_s + secs < arrival_[loc]) {
      arrival_[loc] = dep_s + secs;
      seeds.push_back(loc);
      if (loc < net_.n_stops() && !is_marked_[loc]) {
        is_marked_[loc] = 1;
        marked_.push_back(loc);
      }
    }
  }
  relax_walking(seeds);

  const auto& tt = net_.tt;
  const double slack = net_.cfg.min_transfer_s;
  std::vector<int> improved;
  while (!marked_.empty()) {
    // collect earliest marked position per route
    touched_routes_.clear();
    for (int stop : marked_) {
      is_marked_[stop] = 0;
      for (const auto& [r, pos] : tt.routes_at_stop[stop]) {
        if (route_from_[r] < 0) {
          route_from_[r] = pos;
          touched_routes_.push_back(r);
        } else if (pos < route_from_[r]) {
          route_from_[r] = pos;
        }
      }
    }
    marked_.clear();

    improved.clear();
    for (int r : touched_routes_) {
      const auto& route = tt.routes[r];
      const int n_stops_in_route = static_cast<int>(route.stops.size());
      const int from = route_from_[r];
      route_from_[r] = -1;
      int onboard = -1;
      for (int k = from; k < n_stops_in_route; ++k) {
        const int stop = route.stops[k];
        if (onboard >= 0) {
          const double t_arr = tt.arr_at(r, onboard, k);
          if (t_arr < arrival_[stop]) {
            arrival_[stop] = t_arr;
            if (!is_marked_[stop]) {
              is_marked_[stop] = 1;
              improved.push_back(stop);
            }
          }
        }
        // earliest boardable trip at this position (departures are
        // trip-sorted by the non-overtaking split)
        const double ready = arrival_[stop] + slack;
        if (arrival_[stop] < kUnreachable) {
          int lo = 0, hi = route.n_trips;
          while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (tt.dep_at(r, mid, k) >= ready)
              hi = mid;
            else
              lo = mid + 1;
          }
          if (lo < route.n_trips && (onboard < 0 || lo < onboard)) onboard = lo;
        }
      }
    }

    // spread the new transit arrivals by walking; newly improved stops
    // (incl. via transfers) seed the next round
    marked_ = improved;
    relax_walking(improved);
  }
}

std::optional<double> shortest_time_minutes(const Network& net, Vec2 origin, Vec2 dest) {
  Raptor raptor(net);
  const auto egress = net.access_links(dest);
  const double direct_m = distance(origin, dest);
  const double direct_s =
      direct_m <= net.cfg.max_access_walk_m ? direct_m / net.cfg.walk_speed_ms() : kUnreachable;
  double best = kUnreachable;
  for (int dep = net.cfg.window_start_s; dep < net.cfg.window_end_s; dep += net.cfg.step_s) {
    raptor.run(origin, dep);
    double arr = dep + direct_s;
    for (const auto& [loc, secs] : egress)
      arr = std::min(arr, raptor.arrival()[loc] + secs);
    best = std::min(best, arr - dep);
  }
  if (best == kUnreachable) return std::nullopt;
  return best / 60.0;
}

TravelTimeMatrix build_matrix(const Network& net, const HexGrid& grid, int threads) {
  TravelTimeMatrix m;
  std::vector<Vec2> origin_pos, dest_pos;
  for (const auto& h : grid.hexes) {
    if (h.user_share > 0) {
      m.origin_ids.push_back(hex_id(h.q, h.r));
      origin_pos.push_back(h.center);
    }
    if (h.opportunity_share > 0) {
      m.dest_ids.push_back(hex_id(h.q, h.r));
      dest_pos.push_back(h.center);
    }
  }
  const std::size_t n_orig = m.origin_ids.size(), n_dest = m.dest_ids.size();
  m.minutes.assign(n_orig * n_dest, kUnreachable);

  // per-destination egress candidates, shared read-only
  std::vector<std::vector<std::pair<int, double>>> egress(n_dest);
  for (std::size_t j = 0; j < n_dest; ++j) egress[j] = net.access_links(dest_pos[j]);

  const double R = net.cfg.max_access_walk_m;
  const double v = net.cfg.walk_speed_ms();

  auto compute_row = [&](std::size_t i, Raptor& raptor, std::vector<double>& row) {
    std::fill(row.begin(), row.end(), kUnreachable);
    for (int dep = net.cfg.window_start_s; dep < net.cfg.window_end_s; dep += net.cfg.step_s) {
      raptor.run(origin_pos[i], dep);
      const auto& arrival = raptor.arrival();
      for (std::size_t j = 0; j < n_dest; ++j) {
        const double direct = distance(origin_pos[i], dest_pos[j]);
        double arr = direct <= R ? dep + direct / v : kUnreachable;
        for (const auto& [loc, secs] : egress[j]) arr = std::min(arr, arrival[loc] + secs);
        row[j] = std::min(row[j], arr - dep);
      }
    }
    for (std::size_t j = 0; j < n_dest; ++j)
      m.minutes[i * n_dest + j] = row[j] == kUnreachable ? kUnreachable : row[j] / 60.0;
  };

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(n_orig ? n_orig : 1)));
  if (threads == 1) {
    Raptor raptor(net);
    std::vector<double> row(n_dest);
    for (std::size_t i = 0; i < n_orig; ++i) compute_row(i, raptor, row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        Raptor raptor(net);
        std::vector<double> row(n_dest);
        for (std::size_t i = next.fetch_add(1); i < n_orig; i = next.fetch_add(1))
          compute_row(i, raptor, row);
      });
    for (auto& th : pool) th.join();
  }
  return m;
}

void TravelTimeMatrix::save_csv(const std::string& path) const {
  CsvWriter out(path, {"origin_hex", "dest_hex", "minutes"});
  for (std::size_t i = 0; i < origin_ids.size(); ++i)
    for (std::size_t j = 0; j < dest_ids.size(); ++j)
      out.row({origin_ids[i], dest_ids[j], fmt_double(at(i, j))});
  out.close();
}

TravelTimeMatrix TravelTimeMatrix::load_csv(const std::string& path) {
  TravelTimeMatrix m;
  CsvReader in(path);
  in.require({"origin_hex", "dest_hex", "minutes"});
  std::vector<std::string> row;
  std::map<std::string, std::size_t> oidx, didx;
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  while (in.next(row)) {
    auto o = oidx.emplace(row[0], m.origin_ids.size());
    if (o.second) m.origin_ids.push_back(row[0]);
    auto d = didx.emplace(row[1], m.dest_ids.size());
    if (d.second) m.dest_ids.push_back(row[1]);
    const double v = row[2] == "inf" ? kUnreachable : std::stod(row[2]);
    entries.emplace_back(o.first->second, d.first->second, v);
  }
  m.minutes.assign(m.origin_ids.size() * m.dest_ids.size(), kUnreachable);
  for (const auto& [i, j, v] : entries) m.minutes[i * m.dest_ids.size() + j] = v;
  return m;
}

}  // namespace commutekit

// Acceptance suite: runs the toolkit's exit criteria end to end at desk scale
// and prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commutekit/access.hpp"
#include "commutekit/anchors.hpp"
#include "commutekit/config.hpp"
#include "commutekit/geo.hpp"
#include "commutekit/ingest.hpp"
#include "commutekit/lisa.hpp"
#include "commutekit/pipeline.hpp"
#include "commutekit/router.hpp"
#include "commutekit/stats.hpp"
#include "commutekit/synth.hpp"
#include "commutekit/util.hpp"
#include "oracles.hpp"

using namespace commutekit;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void require(bool ok, const std::string& what) {
  if (!ok) {
    g_notes.push_back(what);
  }
}

void criterion(int number, const std::string& title, const std::function<void()>& body) {
  g_notes.clear();
  double ms = 0;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  } catch (const std::exception& e) {
    g_notes.push_back(std::string("exception: ") + e.what());
  }
  if (g_notes.empty()) {
    std::printf("[PASS] criterion %2d: %s (%.1f s)\n", number, title.c_str(), ms / 1000.0);
  } else {
    ++g_failures;
    std::printf("[FAIL] criterion %2d: %s\n", number, title.c_str());
    for (const auto& n : g_notes) std::printf("       - %s\n", n.c_str());
  }
  std::fflush(stdout);
}

struct Workspace {
  fs::path root;
  Workspace() {
    root = fs::temp_directory_path() / "ck_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
  }
  std::string dir(const std::string& name) const {
    const fs::path p = root / name;
    fs::create_directories(p);
    return p.string();
  }
};

Workspace g_ws;

// -- criterion 1 ------------------------------------------------------------

void anchor_oracle_equivalence() {
  const YearMonth month = YearMonth::parse("2023-03");

  CitySpec spec;
  spec.seed = 42;
  spec.n_users = 1000;
  spec.n_bts = 60;
  spec.noise = 0.2;
  const std::string noisy = g_ws.dir("c1_noisy");
  generate_city(spec, noisy);

  const auto t0 = std::chrono::steady_clock::now();
  const auto reg = TowerRegistry::load(noisy + "/bts.csv");
  const auto rep = parse_events(noisy + "/events.csv", reg, month, TzOffset{0}, true);
  const auto counts = bin_hourly(rep.events, TzOffset{0});
  const auto active = filter_active_users(counts, month);
  const auto res = detect_anchors(counts, active, month);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs < 5.0, "detection pipeline took " + fmt_double(secs) + " s (budget 5 s)");

  const auto oracle = oracles::brute_force_anchors(counts, active, month);
  require(res.pairs.size() == oracle.pairs.size(), "pair count differs from brute force");
  for (const auto& p : res.pairs) {
    const auto it = oracle.pairs.find(p.user_id);
    if (it == oracle.pairs.end() || it->second.first != p.home_bts ||
        it->second.second != p.work_bts) {
      require(false, "anchor mismatch for " + p.user_id);
      break;
    }
  }
  require(res.rejected.size() == oracle.rejected.size(), "rejection count differs");

  // noise 0: planted anchors recovered exactly
  spec.noise = 0.0;
  const std::string clean = g_ws.dir("c1_clean");
  generate_city(spec, clean);
  const auto truth = nlohmann::json::parse(read_file(clean + "/truth.json"));
  const auto reg2 = TowerRegistry::load(clean + "/bts.csv");
  const auto rep2 = parse_events(clean + "/events.csv", reg2, month, TzOffset{0}, true);
  const auto counts2 = bin_hourly(rep2.events, TzOffset{0});
  const auto res2 = detect_anchors(counts2, filter_active_users(counts2, month), month);
  require(res2.pairs.size() == 1000, "noise-free city must anchor every user");
  std::size_t recovered = 0;
  for (const auto& p : res2.pairs) {
    const auto& t = truth.at("anchors").at(p.user_id);
    recovered += t.at("home") == p.home_bts && t.at("work") == p.work_bts;
  }
  require(recovered == res2.pairs.size(),
          "recovered " + std::to_string(recovered) + "/1000 planted anchors");
}

// -- criterion 2 ------------------------------------------------------------

void weight_tables() {
  const int hw[24] = {2, 2, 3, 3, 2, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  const int ww[24] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 2, 1, 1, 2, 2, 2, 2, 0, 0, 0, 0, 0, 0};
  for (int h = 0; h < 24; ++h) {
    require(home_weight(h) == hw[h], "home_weight(" + std::to_string(h) + ")");
    require(work_weight(h) == ww[h], "work_weight(" + std::to_string(h) + ")");
  }
}

// -- criterion 3 ------------------------------------------------------------

void active_user_boundary() {
  const YearMonth march = YearMonth::parse("2023-03");
  HourlyCounts counts;
  for (int i = 0; i < 62; ++i) counts.add("u62", "b1", 1 + i % 31, i % 24);
  for (int i = 0; i < 63; ++i) counts.add("u63", "b1", 1 + i % 31, i % 24);
  const auto active = filter_active_users(counts, march);
  require(active.count("u63") == 1, "63 events in March must be active");
  require(active.count("u62") == 0, "62 events in March must be excluded");
}

// -- criterion 4 ------------------------------------------------------------

void geometry_checks() {
  CounterRng rng(4242, 1);
  const Ring boundary{{-5000, -5000}, {5000, -5000}, {5000, 5000}, {-5000, 5000}};
  const double barea = ring_area(boundary);
  for (int layout = 0; layout < 200; ++layout) {
    const int n_sites = 20 + static_cast<int>(rng.below(41));
    std::vector<std::pair<std::string, Vec2>> sites;
    for (int s = 0; s < n_sites; ++s)
      sites.emplace_back("s" + std::to_string(s),
                         Vec2{(rng.uniform() - 0.5) * 9800, (rng.uniform() - 0.5) * 9800});
    const auto cells = voronoi(sites, boundary);
    double total = 0;
    for (const auto& c : cells) total += ring_area(c.polygon);
    if (std::abs(total - barea) / barea >= 1e-6) {
      require(false, "area sum off by " + fmt_double(std::abs(total - barea) / barea) +
                         " in layout " + std::to_string(layout));
      return;
    }
    for (int q = 0; q < 10000; ++q) {
      const Vec2 p{(rng.uniform() - 0.5) * 9999, (rng.uniform() - 0.5) * 9999};
      std::size_t nearest = 0;
      for (std::size_t s = 1; s < sites.size(); ++s)
        if (distance(p, sites[s].second) < distance(p, sites[nearest].second)) nearest = s;
      if (!point_in_ring(cells[nearest].polygon, p)) {
        require(false, "point outside its nearest site's cell in layout " +
                           std::to_string(layout));
        return;
      }
    }
  }

  // disaggregation conserves mass
  CounterRng rng2(4242, 2);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::pair<std::string, Vec2>> sites;
    for (int s = 0; s < 25; ++s)
      sites.emplace_back("s" + std::to_string(s),
                         Vec2{(rng2.uniform() - 0.5) * 9000, (rng2.uniform() - 0.5) * 9000});
    const auto cells = voronoi(sites, boundary);
    auto hexes = build_hex_grid(boundary, 400.0);
    assign_hexes(hexes, cells, 400.0);
    std::map<std::string, double> home, work;
    double ht = 0, wt = 0;
    for (const auto& [id, pos] : sites) {
      home[id] = static_cast<double>(rng2.below(500));
      work[id] = static_cast<double>(rng2.below(500));
      ht += home[id];
      wt += work[id];
    }
    disaggregate(home, work, hexes);
    double hs = 0, ws = 0;
    for (const auto& h : hexes) {
      hs += h.user_share;
      ws += h.opportunity_share;
    }
    require(std::abs(hs - ht) < 1e-9 * std::max(1.0, ht), "user mass not conserved");
    require(std::abs(ws - wt) < 1e-9 * std::max(1.0, wt), "opportunity mass not conserved");
  }
}

// -- criterion 5 ------------------------------------------------------------

void routing_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const Projection proj = Projection::at(0.0, 0.0);
  CounterRng rng(2025, 5);
  for (int net_i = 0; net_i < 200; ++net_i) {
    const std::string dir = g_ws.dir("c5_net" + std::to_string(net_i));
    const auto g = oracles::random_gtfs(rng, 30, 60, 5000, proj);
    g.write(dir + "/gtfs");
    const auto s = oracles::random_streets(rng, 4 + static_cast<int>(rng.below(20)), 5000);
    s.write(dir + "/streets", proj);
    RouterConfig cfg;
    cfg.min_transfer_s = rng.below(2) ? 0.0 : 60.0;
    TimetableNetwork tt = load_gtfs(dir + "/gtfs", proj, "monday");
    WalkGraph walk = WalkGraph::load(dir + "/streets", proj);
    const Network net(std::move(tt), std::move(walk), cfg);
    for (int q = 0; q < 500; ++q) {
      const Vec2 o{(rng.uniform() - 0.5) * 5200, (rng.uniform() - 0.5) * 5200};
      const Vec2 d{(rng.uniform() - 0.5) * 5200, (rng.uniform() - 0.5) * 5200};
      const double dep = 6 * 3600 + rng.uniform() * 4 * 3600;
      const double got = oracles::raptor_earliest_arrival_s(net, o, d, dep);
      const double want = oracles::time_expanded_earliest_arrival_s(net, o, d, dep);
      const bool ok = (std::isinf(got) && std::isinf(want)) ||
                      (!std::isinf(got) && !std::isinf(want) &&
                       std::abs(got - want) / 60.0 < 1e-6);
      if (!ok) {
        require(false, "query mismatch in network " + std::to_string(net_i) + ": got " +
                           fmt_double(got) + " want " + fmt_double(want));
        return;
      }
    }
    fs::remove_all(dir);
  }

  // monotonicity: adding a trip never increases a matrix entry
  HexGrid grid;
  grid.edge_m = 174.0;
  for (int q = -2; q <= 2; ++q)
    for (int r = -2; r <= 2; ++r)
      grid.hexes.push_back({q, r, hex_center(q, r, 900.0), "x", 1.0, 1.0});
  RouterConfig fast_cfg;
  fast_cfg.step_s = 1200;
  for (int rep = 0; rep < 50; ++rep) {
    const std::string dir = g_ws.dir("c5_mut" + std::to_string(rep));
    auto g = oracles::random_gtfs(rng, 20, 30, 4000, proj);
    g.write(dir + "/gtfs");
    const auto s = oracles::random_streets(rng, 10, 4000);
    s.write(dir + "/streets", proj);
    TimetableNetwork tt0 = load_gtfs(dir + "/gtfs", proj, "monday");
    WalkGraph walk0 = WalkGraph::load(dir + "/streets", proj);
    const Network base(std::move(tt0), std::move(walk0), fast_cfg);
    const TravelTimeMatrix m0 = build_matrix(base, grid, 2);

    std::vector<std::string> seq;
    for (const auto& st : g.stop_times)
      if (st.trip == g.trips[0].first) seq.push_back(st.stop);
    int clock = 7 * 3600 + static_cast<int>(rng.below(3600));
    g.trips.emplace_back("extra", g.trips[0].second);
    for (std::size_t k = 0; k < seq.size(); ++k) {
      g.stop_times.push_back(
          {"extra", static_cast<int>(k + 1), clock, clock, seq[k]});
      clock += 30 + static_cast<int>(rng.below(120));
    }
    g.write(dir + "/gtfs");
    TimetableNetwork tt1 = load_gtfs(dir + "/gtfs", proj, "monday");
    WalkGraph walk1 = WalkGraph::load(dir + "/streets", proj);
    const Network richer(std::move(tt1), std::move(walk1), fast_cfg);
    const TravelTimeMatrix m1 = build_matrix(richer, grid, 2);
    for (std::size_t k = 0; k < m0.minutes.size(); ++k)
      if (!std::isinf(m0.minutes[k]) && m1.minutes[k] > m0.minutes[k] + 1e-9) {
        require(false, "matrix entry increased after adding a trip");
        return;
      }
    fs::remove_all(dir);
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs < 60.0, "routing checks took " + fmt_double(secs) + " s (budget 60 s)");
}

// -- criterion 6 ------------------------------------------------------------

void cumulative_access_oracle() {
  CounterRng rng(6, 6);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 200;
    TravelTimeMatrix m;
    for (int i = 0; i < n; ++i) m.origin_ids.push_back(hex_id(i, 0));
    m.dest_ids = m.origin_ids;
    m.minutes.resize(n * n);
    for (auto& v : m.minutes) v = rng.below(25) == 0 ? kUnreachable : rng.uniform() * 120.0;
    std::map<std::string, double> opp;
    for (const auto& id : m.origin_ids) opp[id] = rng.uniform() * 8.0;

    const double T = 10.0 + rng.uniform() * 80.0;
    const auto coa = cumulative_access(m, opp, T);
    for (int i = 0; i < n; ++i) {
      double expect = 0;
      for (int j = 0; j < n; ++j)
        if (m.at(i, j) <= T) expect += opp.at(m.dest_ids[j]);
      if (std::abs(coa[i] - expect) >= 1e-9) {
        require(false, "coa differs from brute force at origin " + std::to_string(i));
        return;
      }
    }
    std::vector<double> prev(n, 0.0);
    for (int k = 0; k < 20; ++k) {
      const auto cur = cumulative_access(m, opp, 6.0 * k);
      for (int i = 0; i < n; ++i)
        if (cur[i] < prev[i] - 1e-12) {
          require(false, "coa not monotone in T");
          return;
        }
      prev = cur;
    }
  }
}

// -- criterion 7 ------------------------------------------------------------

void palma_checks() {
  // uniform commute times
  std::vector<PalmaItem> uniform;
  std::vector<std::string> ukeys;
  CounterRng rng(7, 7);
  for (int i = 0; i < 123; ++i) {
    uniform.push_back({rng.uniform() * 100, 1.0 + static_cast<double>(rng.below(7)), 46.8});
    ukeys.push_back("h" + std::to_string(i));
  }
  require(std::abs(palma_ratio(uniform, ukeys) - 1.0) <= 1e-12, "uniform palma must be 1.0");

  // expansion oracle on a 500-hex instance
  std::vector<PalmaItem> items;
  std::vector<std::string> keys;
  long long total = 0;
  for (int i = 0; i < 500; ++i) {
    PalmaItem it;
    it.smi = std::floor(rng.uniform() * 1000.0) / 10.0;
    it.weight = 1.0 + static_cast<double>(rng.below(20));
    it.value = 5.0 + rng.uniform() * 80.0;
    total += static_cast<long long>(it.weight);
    items.push_back(it);
    char buf[16];
    std::snprintf(buf, sizeof buf, "h%04d", i);
    keys.push_back(buf);
  }
  items[0].weight += static_cast<double>((10 - total % 10) % 10);
  const double got = palma_ratio(items, keys);

  struct Person {
    double smi, value;
    std::string key;
  };
  std::vector<Person> persons;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (int c = 0; c < static_cast<int>(items[i].weight); ++c)
      persons.push_back({items[i].smi, items[i].value, keys[i]});
  std::sort(persons.begin(), persons.end(), [](const Person& a, const Person& b) {
    if (a.smi != b.smi) return a.smi > b.smi;
    return a.key < b.key;
  });
  const std::size_t W = persons.size();
  double top = 0, bottom = 0;
  for (std::size_t i = 0; i < W / 10; ++i) top += persons[i].value;
  for (std::size_t i = 0; i < 4 * W / 10; ++i) bottom += persons[W - 1 - i].value;
  const double want = (top / (W / 10.0)) / (bottom / (4.0 * W / 10.0));
  require(std::abs(got - want) < 1e-9,
          "expansion oracle: got " + fmt_double(got) + " want " + fmt_double(want));

  // scale invariance at 3.7
  auto scaled = items;
  for (auto& it : scaled) it.value *= 3.7;
  require(std::abs(palma_ratio(scaled, keys) - got) < 1e-12, "palma not scale invariant");
}

// -- criterion 8 ------------------------------------------------------------

void lisa_checks() {
  // ~500-hex random fields vs the naive formula
  std::vector<HexCell> hexes;
  for (int q = 0; q < 22; ++q)
    for (int r = 0; r < 23; ++r) hexes.push_back({q, r, hex_center(q, r, 100.0), "", 0, 0});
  const SpatialWeights w = build_weights(hexes);
  const std::size_t n = w.ids.size();
  CounterRng rng(8, 8);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal() * 2 + 5;
    y[i] = 0.5 * x[i] + rng.normal();
  }
  const auto res = bivariate_lisa(x, y, w, 999, 0.05, 42, 2);

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double vx = 0, vy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  const double sx = std::sqrt(vx / n), sy = std::sqrt(vy / n);
  double mean_i = 0, global = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double lag = 0;
    for (int j : w.neighbors[i]) lag += (y[j] - my) / sy;
    lag /= static_cast<double>(w.neighbors[i].size());
    const double want = (x[i] - mx) / sx * lag;
    if (std::abs(res[i].moran_i - want) >= 1e-9) {
      require(false, "moran_i differs from the naive formula at hex " + w.ids[i]);
      return;
    }
    mean_i += res[i].moran_i;
    global += want;
  }
  require(std::abs(mean_i / n - global / n) < 1e-9, "mean I_i != global bivariate Moran");

  // bit-identical across reruns and thread counts 1/4/8
  const auto r1 = bivariate_lisa(x, y, w, 999, 0.05, 42, 1);
  const auto r4 = bivariate_lisa(x, y, w, 999, 0.05, 42, 4);
  const auto r8 = bivariate_lisa(x, y, w, 999, 0.05, 42, 8);
  for (std::size_t i = 0; i < n; ++i) {
    if (r1[i].pseudo_p != r4[i].pseudo_p || r1[i].pseudo_p != r8[i].pseudo_p ||
        r1[i].pseudo_p != res[i].pseudo_p || r1[i].cls != r8[i].cls) {
      require(false, "pseudo-p not bit-identical across thread counts");
      return;
    }
  }

  // planted two-block field
  std::vector<HexCell> block;
  for (int q = 0; q < 12; ++q)
    for (int r = 0; r < 8; ++r) block.push_back({q, r, hex_center(q, r, 100.0), "", 0, 0});
  const SpatialWeights wb = build_weights(block);
  std::vector<double> bx(wb.ids.size()), by(wb.ids.size());
  std::vector<int> qs(wb.ids.size());
  for (std::size_t i = 0; i < wb.ids.size(); ++i) {
    int q, r;
    parse_hex_id(wb.ids[i], q, r);
    qs[i] = q;
    bx[i] = q >= 6 ? 10.0 : 1.0;
    by[i] = q >= 6 ? 50.0 : 20.0;
  }
  const auto planted = bivariate_lisa(bx, by, wb, 999, 0.05, 42, 2);
  int checked = 0;
  for (std::size_t i = 0; i < wb.ids.size(); ++i) {
    if (wb.neighbors[i].size() < 6) continue;
    bool frontier = false;
    for (int j : wb.neighbors[i]) frontier |= (qs[j] >= 6) != (qs[i] >= 6);
    if (frontier) continue;
    ++checked;
    const LisaClass want = qs[i] >= 6 ? LisaClass::HH : LisaClass::LL;
    if (planted[i].cls != want) {
      require(false, std::string("interior hex ") + wb.ids[i] + " classed " +
                         lisa_class_name(planted[i].cls));
      return;
    }
  }
  require(checked > 10, "planted field has too few interior hexes to judge");
}

// -- criterion 9 ------------------------------------------------------------

void rank_test_checks() {
  const KWResult kw = kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  require(std::abs(kw.H - 7.2) < 1e-9, "KW H on the hand example: " + fmt_double(kw.H));

  // Holm-Sidak closed form, evaluated here independently:
  // sorted {0.01, 0.03, 0.04} with exponents {3, 2, 1}, then a running max
  const std::vector<double> raw{0.01, 0.04, 0.03};
  std::vector<double> sorted_p{0.01, 0.03, 0.04};
  std::vector<double> closed(3);
  double run = 0;
  for (int i = 0; i < 3; ++i) {
    run = std::max(run, 1.0 - std::pow(1.0 - sorted_p[i], 3 - i));
    closed[i] = run;
  }
  const std::map<double, double> closed_of{{0.01, closed[0]}, {0.03, closed[1]}, {0.04, closed[2]}};
  const auto adj = holm_sidak(raw);
  for (int i = 0; i < 3; ++i)
    require(std::abs(adj[i] - closed_of.at(raw[i])) < 1e-6,
            "holm-sidak[" + std::to_string(i) + "] = " + fmt_double(adj[i]) + ", closed form " +
                fmt_double(closed_of.at(raw[i])));

  // Dunn z under heavy ties vs the direct formula
  CounterRng rng(9, 9);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<double>> groups(3);
    for (auto& g : groups)
      for (int i = 0; i < 12 + static_cast<int>(rng.below(10)); ++i)
        g.push_back(static_cast<double>(rng.below(6)));
    const auto entries = dunn_posthoc(groups);

    std::vector<std::pair<double, int>> pooled;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (double v : groups[g]) pooled.emplace_back(v, static_cast<int>(g));
    std::sort(pooled.begin(), pooled.end());
    const double N = static_cast<double>(pooled.size());
    std::vector<double> rank(pooled.size());
    double ties = 0;
    for (std::size_t i = 0; i < pooled.size();) {
      std::size_t j = i;
      while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
      ties += std::pow(static_cast<double>(j - i), 3) - static_cast<double>(j - i);
      for (std::size_t k = i; k < j; ++k) rank[k] = (i + 1.0 + j) / 2.0;
      i = j;
    }
    std::vector<double> rsum(3, 0), cnt(3, 0);
    for (std::size_t k = 0; k < pooled.size(); ++k) {
      rsum[pooled[k].second] += rank[k];
      cnt[pooled[k].second] += 1;
    }
    for (const auto& e : entries) {
      const double se = std::sqrt((N * (N + 1) / 12.0 - ties / (12.0 * (N - 1))) *
                                  (1.0 / cnt[e.a] + 1.0 / cnt[e.b]));
      const double want = (rsum[e.a] / cnt[e.a] - rsum[e.b] / cnt[e.b]) / se;
      if (std::abs(e.z - want) >= 1e-9) {
        require(false, "dunn z mismatch: " + fmt_double(e.z) + " vs " + fmt_double(want));
        return;
      }
    }
  }
}

// -- criterion 10 -----------------------------------------------------------

void multinomial_checks() {
  // binary subproblem against an independent damped-Newton logit lives in the
  // unit suite; here the structural requirements run at acceptance scale
  CounterRng rng(10, 10);

  // intercept-only: McFadden exactly zero
  {
    std::vector<std::vector<double>> rows(500);
    std::vector<std::string> labels;
    const char* cls[4] = {"NS", "HH", "LL", "LH"};
    for (int i = 0; i < 500; ++i) labels.push_back(cls[rng.below(4)]);
    const MnlFit fit = fit_multinomial(rows, labels, {}, "NS");
    require(fit.mcfadden_r2 == 0.0, "intercept-only McFadden must be exactly 0");
  }

  // binary two-class fits equal a separately coded damped-Newton logit
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::vector<int> y;
    for (int i = 0; i < 800; ++i) {
      std::vector<double> r{rng.normal(), rng.normal() * 2.0, rng.normal() + 1.0};
      const double eta = 0.9 * r[0] - 0.6 * r[1] / 2.0 + 0.4 * (r[2] - 1.0) - 0.2;
      const int yi = rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
      labels.push_back(yi ? "HH" : "NS");
      y.push_back(yi);
      rows.push_back(r);
    }
    const MnlFit fit = fit_multinomial(rows, labels, {"a", "b", "c"}, "NS", 1e-4, 1e-10, 300);
    const auto oracle = oracles::binary_logit_oracle(rows, y, 1e-4);
    for (std::size_t j = 0; j < oracle.size(); ++j)
      require(std::abs(fit.coefficients[1][j] - oracle[j]) < 1e-6,
              "binary-logit coefficient " + std::to_string(j) + " differs: " +
                  fmt_double(fit.coefficients[1][j]) + " vs " + fmt_double(oracle[j]));
  }

  // NS-row odds ratios exactly 1, null-case flatness on n = 10,000
  {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    const char* cls[3] = {"NS", "HH", "LL"};
    for (int i = 0; i < 10000; ++i) {
      rows.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal(), rng.normal()});
      labels.push_back(cls[rng.below(3)]);
    }
    const MnlFit fit =
        fit_multinomial(rows, labels, {"v1", "v2", "v3", "v4", "v5"}, "NS", 1e-4, 1e-8, 200);
    for (double orr : fit.odds_ratios[0])
      require(orr == 1.0, "reference-class odds ratio must be exactly 1.000");
    for (std::size_t c = 1; c < fit.classes.size(); ++c)
      for (double orr : fit.odds_ratios[c])
        require(std::abs(orr - 1.0) < 0.05,
                "null-case odds ratio " + fmt_double(orr) + " outside 1 +- 0.05");
    require(fit.mcfadden_r2 < 0.01,
            "null-case McFadden " + fmt_double(fit.mcfadden_r2) + " >= 0.01");
  }
}

// -- criterion 11 -----------------------------------------------------------

void end_to_end() {
  CitySpec spec;
  spec.seed = 7;
  spec.n_bts = 60;
  spec.n_users = 5000;
  spec.n_routes = 10;
  spec.noise = 0.1;
  const std::string city = g_ws.dir("c11_city");
  generate_city(spec, city);

  const std::vector<std::string> results = {"hourly_counts.csv", "anchors.csv",
                                            "hexgrid.geojson",   "matrix.csv",
                                            "hex_metrics.csv",   "scatter.csv",
                                            "access_summary.json", "lisa.geojson", "report.json"};

  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg_a =
      RunConfig::load(city + "/config.json", {"threads=8", "output.dir=out_a"});
  run_pipeline(cfg_a, all_stages());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs < 120.0, "pipeline took " + fmt_double(secs) + " s (budget 120 s)");

  const RunConfig cfg_b =
      RunConfig::load(city + "/config.json", {"threads=8", "output.dir=out_b"});
  run_pipeline(cfg_b, all_stages());
  const RunConfig cfg_c =
      RunConfig::load(city + "/config.json", {"threads=1", "output.dir=out_c"});
  run_pipeline(cfg_c, all_stages());

  for (const auto& f : results) {
    const std::string ha = sha256_file((fs::path(cfg_a.out_dir) / f).string());
    require(ha == sha256_file((fs::path(cfg_b.out_dir) / f).string()),
            f + " differs between reruns");
    require(ha == sha256_file((fs::path(cfg_c.out_dir) / f).string()),
            f + " differs between --threads 1 and --threads 8");
  }
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion(1, "anchor detection matches brute force; noise-free recovery is total",
            anchor_oracle_equivalence);
  criterion(2, "hour weight tables exact on all 24 hours", weight_tables);
  criterion(3, "active-user strict >2/day boundary (62 vs 63 in March)", active_user_boundary);
  criterion(4, "voronoi area partition, nearest-site membership, mass conservation",
            geometry_checks);
  criterion(5, "raptor equals time-expanded Dijkstra; timetable monotonicity", routing_oracle);
  criterion(6, "cumulative access equals brute force and is monotone in T",
            cumulative_access_oracle);
  criterion(7, "palma: uniform=1, expansion oracle, scale invariance", palma_checks);
  criterion(8, "lisa: formula oracle, global identity, determinism, planted blocks",
            lisa_checks);
  criterion(9, "kruskal-wallis 7.2, holm-sidak closed form, dunn z with ties",
            rank_test_checks);
  criterion(10, "multinomial logit: binary oracle, exact NS row, null-case flatness",
            multinomial_checks);
  criterion(11, "end-to-end run under budget, byte-identical across reruns and threads",
            end_to_end);

  if (g_failures == 0)
    std::printf("\nall criteria passed\n");
  else
    std::printf("\n%d criterion(s) FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

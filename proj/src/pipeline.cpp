#include "commutekit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "commutekit/access.hpp"
#include "commutekit/anchors.hpp"
#include "commutekit/csv.hpp"
#include "commutekit/geo.hpp"
#include "commutekit/ingest.hpp"
#include "commutekit/lisa.hpp"
#include "commutekit/router.hpp"
#include "commutekit/stats.hpp"
#include "commutekit/util.hpp"

namespace commutekit {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* kVersion = "0.1.0";

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

json sorted_json(const json& j) { return nlohmann::json::parse(j.dump()); }

// ---------------------------------------------------------------------------
// small input loaders shared by stages

std::map<std::string, double> load_value_csv(const std::string& path, const std::string& id_col,
                                             const std::string& value_col) {
  std::map<std::string, double> out;
  CsvReader in(path);
  in.require({id_col, value_col});
  std::vector<std::string> row;
  while (in.next(row)) out[row[0]] = std::stod(row[1]);
  return out;
}

struct Demographics {
  std::vector<std::string> variables;
  std::map<std::string, std::vector<double>> by_hex;
};

Demographics load_demographics(const std::string& path) {
  Demographics d;
  d.variables = {"gender_ratio", "immigrant", "retired", "minor", "indigenous"};
  CsvReader in(path);
  std::vector<std::string> cols{"hex_id"};
  cols.insert(cols.end(), d.variables.begin(), d.variables.end());
  in.require(cols);
  std::vector<std::string> row;
  while (in.next(row)) {
    std::vector<double> vals;
    for (std::size_t i = 1; i < row.size(); ++i) {
      const double v = std::stod(row[i]);
      if (!(v >= 0.0 && v <= 100.0))
        throw std::runtime_error(path + ": value out of [0,100] for hex " + row[0]);
      vals.push_back(v);
    }
    d.by_hex[row[0]] = std::move(vals);
  }
  return d;
}

// ---------------------------------------------------------------------------
// stage bodies

void run_ingest(const RunConfig& cfg) {
  const TowerRegistry registry = TowerRegistry::load(cfg.bts);
  const ParseReport rep =
      parse_events(cfg.events, registry, cfg.month, cfg.tz, cfg.naive_timestamps);
  const HourlyCounts counts = bin_hourly(rep.events, cfg.tz);
  const auto active = filter_active_users(counts, cfg.month);

  counts.save_csv(out_path(cfg, "hourly_counts.csv"));
  {
    CsvWriter out(out_path(cfg, "active_users.csv"), {"user_id"});
    for (const auto& u : active) out.row({u});
    out.close();
  }
  json report = {{"rows_total", rep.rows_total},
                 {"rows_kept", rep.events.size()},
                 {"events_binned", counts.total},
                 {"active_users", active.size()},
                 {"users_seen", counts.by_user.size()},
                 {"dropped", rep.dropped},
                 {"malformed_lines", rep.malformed_lines}};
  write_file(out_path(cfg, "ingest_report.json"), report.dump(1) + "\n");
}

void run_anchors(const RunConfig& cfg) {
  const HourlyCounts counts = HourlyCounts::load_csv(out_path(cfg, "hourly_counts.csv"));
  std::set<std::string> active;
  {
    CsvReader in(out_path(cfg, "active_users.csv"));
    in.require({"user_id"});
    std::vector<std::string> row;
    while (in.next(row)) active.insert(row[0]);
  }
  const AnchorResult res = detect_anchors(counts, active, cfg.month);
  save_anchors_csv(out_path(cfg, "anchors.csv"), res.pairs);
  save_rejected_csv(out_path(cfg, "rejected.csv"), res.rejected);
}

void run_grid(const RunConfig& cfg) {
  const TowerRegistry registry = TowerRegistry::load(cfg.bts);
  const auto lonlat = load_boundary_geojson(cfg.boundary);
  const Projection proj = Projection::from_boundary(lonlat);
  Ring boundary;
  for (const auto& [lon, lat] : lonlat) boundary.push_back(proj.project(lon, lat));

  std::vector<std::pair<std::string, Vec2>> sites;
  for (const auto& [id, pos] : registry.towers)
    sites.emplace_back(id, proj.project(pos.first, pos.second));
  const auto cells = voronoi(sites, boundary);

  std::vector<HexCell> hexes = build_hex_grid(boundary, cfg.hex_edge_m);
  assign_hexes(hexes, cells, cfg.hex_edge_m);

  const auto anchors = load_anchors_csv(out_path(cfg, "anchors.csv"));
  std::map<std::string, double> home_counts, work_counts;
  for (const auto& a : anchors) {
    home_counts[a.home_bts] += 1.0;
    work_counts[a.work_bts] += 1.0;
  }
  disaggregate(home_counts, work_counts, hexes);

  HexGrid grid{cfg.hex_edge_m, proj.lon0(), proj.lat0(), std::move(hexes)};
  save_hexgrid_geojson(out_path(cfg, "hexgrid.geojson"), grid, proj);
}

void run_matrix(const RunConfig& cfg) {
  const HexGrid grid = load_hexgrid_geojson(out_path(cfg, "hexgrid.geojson"));
  const Projection proj = Projection::at(grid.lon0, grid.lat0);
  TimetableNetwork tt = load_gtfs(cfg.gtfs_dir, proj, cfg.router.service_weekday);
  WalkGraph walk = WalkGraph::load(cfg.streets_dir, proj);
  const Network net(std::move(tt), std::move(walk), cfg.router);
  const TravelTimeMatrix m = build_matrix(net, grid, cfg.threads);
  m.save_csv(out_path(cfg, "matrix.csv"));
}

void run_access(const RunConfig& cfg) {
  const TravelTimeMatrix matrix = TravelTimeMatrix::load_csv(out_path(cfg, "matrix.csv"));
  const HexGrid grid = load_hexgrid_geojson(out_path(cfg, "hexgrid.geojson"));
  const auto anchors = load_anchors_csv(out_path(cfg, "anchors.csv"));
  const auto smi = load_value_csv(cfg.smi, "hex_id", "smi");

  const CommuteStats stats = commute_stats(anchors, grid.hexes, matrix);
  const double threshold = cfg.threshold_auto ? stats.citywide_mean : cfg.threshold_min;

  std::map<std::string, double> opp;
  double total_opp = 0.0;
  for (const auto& h : grid.hexes) {
    opp[hex_id(h.q, h.r)] = h.opportunity_share;
    total_opp += h.opportunity_share;
  }
  const auto coa = cumulative_access(matrix, opp, threshold);

  // per origin hex (matrix row order = canonical grid order)
  struct Row {
    std::string id;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double weight = 0.0;
    double coa = 0.0;
    double smi = 0.0;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < matrix.origin_ids.size(); ++i) {
    Row r;
    r.id = matrix.origin_ids[i];
    const auto w = stats.weight.find(r.id);
    if (w != stats.weight.end()) {
      r.weight = w->second;
      r.mean = stats.mean_minutes.at(r.id);
    }
    r.coa = coa[i];
    const auto s = smi.find(r.id);
    if (s == smi.end())
      throw std::runtime_error("smi input is missing hex '" + r.id + "' (" + cfg.smi + ")");
    r.smi = s->second;
    rows.push_back(std::move(r));
  }

  // quartiles, Palma and Gini over hexes with commuting mass
  std::vector<std::size_t> with_mass;
  std::vector<double> q_smi_vals, q_commute_vals, unit_w;
  std::vector<PalmaItem> palma_items;
  std::vector<std::string> palma_keys;
  std::vector<double> gini_vals, gini_w;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].weight > 0)) continue;
    with_mass.push_back(i);
    q_smi_vals.push_back(rows[i].smi);
    q_commute_vals.push_back(rows[i].mean);
    unit_w.push_back(1.0);
    palma_items.push_back({rows[i].smi, rows[i].weight, rows[i].mean});
    palma_keys.push_back(rows[i].id);
    gini_vals.push_back(rows[i].mean);
    gini_w.push_back(rows[i].weight);
  }
  QuartileResult qs, qc;
  if (!with_mass.empty()) {
    qs = quartiles(q_smi_vals, unit_w);
    qc = quartiles(q_commute_vals, unit_w);
  }
  std::vector<int> smi_quartile(rows.size(), 0), commute_quartile(rows.size(), 0);
  for (std::size_t k = 0; k < with_mass.size(); ++k) {
    smi_quartile[with_mass[k]] = qs.quartile[k];
    commute_quartile[with_mass[k]] = qc.quartile[k];
  }

  double palma = std::numeric_limits<double>::quiet_NaN();
  double gini_commute = std::numeric_limits<double>::quiet_NaN();
  if (!with_mass.empty()) {
    palma = palma_ratio(palma_items, palma_keys);
    gini_commute = gini(gini_vals, gini_w);
  }

  {
    CsvWriter out(out_path(cfg, "hex_metrics.csv"),
                  {"hex_id", "mean_commute_min", "commuter_weight", "coa", "coa_share", "smi",
                   "q_smi", "q_commute"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      out.row({r.id, fmt_double(r.mean), fmt_double(r.weight), fmt_double(r.coa),
               fmt_double(total_opp > 0 ? r.coa / total_opp : 0.0), fmt_double(r.smi),
               std::to_string(smi_quartile[i]), std::to_string(commute_quartile[i])});
    }
    out.close();
  }
  {
    CsvWriter out(out_path(cfg, "scatter.csv"),
                  {"hex_id", "coa_share", "mean_commute_min", "smi"});
    for (const auto& r : rows) {
      if (std::isnan(r.mean)) continue;
      out.row({r.id, fmt_double(total_opp > 0 ? r.coa / total_opp : 0.0), fmt_double(r.mean),
               fmt_double(r.smi)});
    }
    out.close();
  }
  json summary = {{"citywide_mean_commute_min", stats.citywide_mean},
                  {"threshold_min", threshold},
                  {"threshold_auto", cfg.threshold_auto},
                  {"palma_ratio", palma},
                  {"gini_commute", gini_commute},
                  {"total_opportunities", total_opp},
                  {"total_commuter_weight", stats.total_weight},
                  {"unreachable_weight", stats.unreachable_weight},
                  {"quartiles_degenerate", qs.degenerate || qc.degenerate}};
  write_file(out_path(cfg, "access_summary.json"), summary.dump(1) + "\n");
}

void run_lisa(const RunConfig& cfg) {
  const HexGrid grid = load_hexgrid_geojson(out_path(cfg, "hexgrid.geojson"));
  std::map<std::string, std::pair<double, double>> fields;  // hex -> (smi, commute)
  {
    CsvReader in(out_path(cfg, "hex_metrics.csv"));
    in.require({"hex_id", "mean_commute_min", "commuter_weight", "smi"});
    std::vector<std::string> row;
    while (in.next(row)) {
      const double weight = std::stod(row[2]);
      if (!(weight > 0)) continue;
      const double mean = row[1] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                          : std::stod(row[1]);
      if (std::isnan(mean)) continue;
      fields[row[0]] = {std::stod(row[3]), mean};
    }
  }
  std::vector<HexCell> subset;
  for (const auto& h : grid.hexes)
    if (fields.count(hex_id(h.q, h.r))) subset.push_back(h);
  if (subset.size() < 2) throw std::runtime_error("lisa: fewer than 2 hexes with commute data");

  const SpatialWeights w = build_weights(subset);
  std::vector<double> x, y;
  for (const auto& id : w.ids) {
    x.push_back(fields[id].first);
    y.push_back(fields[id].second);
  }
  const auto results = bivariate_lisa(x, y, w, cfg.permutations, cfg.alpha, cfg.lisa_seed,
                                      cfg.threads);

  const Projection proj = Projection::at(grid.lon0, grid.lat0);
  json features = json::array();
  for (const auto& res : results) {
    int q, r;
    parse_hex_id(res.hex_id, q, r);
    const Ring ring = hex_ring(q, r, grid.edge_m);
    json outer = json::array();
    for (const auto& p : ring) {
      const auto [lon, lat] = proj.inverse(p);
      outer.push_back({lon, lat});
    }
    const auto [lon0, lat0] = proj.inverse(ring[0]);
    outer.push_back({lon0, lat0});
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({outer})}}},
                        {"properties",
                         {{"hex_id", res.hex_id},
                          {"I_i", res.moran_i},
                          {"pseudo_p", res.pseudo_p},
                          {"class", lisa_class_name(res.cls)},
                          {"island", res.island}}}});
  }
  json fc = {{"type", "FeatureCollection"},
             {"lisa",
              {{"permutations", cfg.permutations}, {"alpha", cfg.alpha}, {"seed", cfg.lisa_seed}}},
             {"features", std::move(features)}};
  write_file(out_path(cfg, "lisa.geojson"), fc.dump() + "\n");
}

void run_stats(const RunConfig& cfg) {
  const json fc = json::parse(read_file(out_path(cfg, "lisa.geojson")));
  std::vector<std::string> hex_ids, classes;
  for (const auto& f : fc.at("features")) {
    hex_ids.push_back(f.at("properties").at("hex_id").get<std::string>());
    classes.push_back(f.at("properties").at("class").get<std::string>());
  }
  const Demographics demo = load_demographics(cfg.demographics);
  std::vector<std::vector<double>> values;
  for (const auto& id : hex_ids) {
    const auto it = demo.by_hex.find(id);
    if (it == demo.by_hex.end())
      throw std::runtime_error("demographics input is missing hex '" + id + "'");
    values.push_back(it->second);
  }
  const CompositionReport rep = cluster_composition_report(classes, values, demo.variables, "NS",
                                                           cfg.l2, cfg.tol, cfg.max_iter);

  json jrep;
  jrep["variables"] = rep.variables;
  jrep["classes_present"] = rep.classes_present;
  jrep["classes_tested"] = rep.classes_tested;
  json fives = json::object();
  for (const auto& [var, per_class] : rep.five_number) {
    json jc = json::object();
    for (const auto& [cls, f] : per_class)
      jc[cls] = {{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}};
    fives[var] = std::move(jc);
  }
  jrep["five_number"] = std::move(fives);
  json kw = json::object();
  for (const auto& [var, res] : rep.kw) kw[var] = {{"H", res.H}, {"p", res.p}};
  jrep["kruskal_wallis"] = std::move(kw);
  json dunn = json::object();
  for (const auto& [var, entries] : rep.dunn) {
    json list = json::array();
    for (const auto& e : entries)
      list.push_back({{"a", e.a}, {"b", e.b}, {"z", e.z}, {"p_raw", e.p_raw}, {"p_adj", e.p_adj}});
    dunn[var] = std::move(list);
  }
  jrep["dunn"] = std::move(dunn);
  if (rep.mnl_fitted) {
    json odds = json::object();
    for (std::size_t c = 0; c < rep.mnl.classes.size(); ++c) {
      json per_var = json::object();
      for (std::size_t v = 0; v < rep.mnl.features.size(); ++v)
        per_var[rep.mnl.features[v]] = rep.mnl.odds_ratios[c][v];
      odds[rep.mnl.classes[c]] = std::move(per_var);
    }
    jrep["multinomial"] = {{"reference", rep.mnl.classes[0]},
                           {"odds_ratios", std::move(odds)},
                           {"mcfadden_r2", rep.mnl.mcfadden_r2},
                           {"accuracy", rep.mnl.accuracy},
                           {"log_likelihood", rep.mnl.log_likelihood},
                           {"null_log_likelihood", rep.mnl.null_log_likelihood},
                           {"iterations", rep.mnl.iterations}};
  }
  jrep["warnings"] = rep.warnings;
  write_file(out_path(cfg, "report.json"), jrep.dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// stage wiring

struct StageSpec {
  Stage stage;
  std::vector<std::string> external_inputs;      // config keys, validated up front
  std::vector<std::string> intermediate_inputs;  // files in out_dir
  std::vector<std::string> outputs;              // files in out_dir
  json config_subset;
  void (*run)(const RunConfig&);
};

std::string input_key_path(const RunConfig& cfg, const std::string& key) {
  if (key == "inputs.events") return cfg.events;
  if (key == "inputs.bts") return cfg.bts;
  if (key == "inputs.boundary") return cfg.boundary;
  if (key == "inputs.gtfs_dir") return cfg.gtfs_dir;
  if (key == "inputs.streets_dir") return cfg.streets_dir;
  if (key == "inputs.smi") return cfg.smi;
  if (key == "inputs.demographics") return cfg.demographics;
  throw std::logic_error("unknown input key " + key);
}

std::vector<std::string> expand_input_files(const RunConfig& cfg, const std::string& key) {
  const std::string path = input_key_path(cfg, key);
  if (key == "inputs.gtfs_dir") {
    std::vector<std::string> files;
    for (const char* name : {"stops.txt", "routes.txt", "trips.txt", "stop_times.txt",
                             "calendar.txt", "transfers.txt", "frequencies.txt"}) {
      const std::string p = (fs::path(path) / name).string();
      if (fs::exists(p)) files.push_back(p);
    }
    return files;
  }
  if (key == "inputs.streets_dir")
    return {(fs::path(path) / "nodes.csv").string(), (fs::path(path) / "edges.csv").string()};
  return {path};
}

StageSpec make_spec(const RunConfig& cfg, Stage s) {
  switch (s) {
    case Stage::Ingest:
      return {s,
              {"inputs.events", "inputs.bts"},
              {},
              {"hourly_counts.csv", "active_users.csv", "ingest_report.json"},
              {{"month", cfg.month.str()},
               {"timezone", cfg.timezone},
               {"naive_timestamps", cfg.naive_timestamps}},
              &run_ingest};
    case Stage::Anchors:
      return {s,
              {},
              {"hourly_counts.csv", "active_users.csv"},
              {"anchors.csv", "rejected.csv"},
              {{"month", cfg.month.str()}},
              &run_anchors};
    case Stage::Grid:
      return {s,
              {"inputs.bts", "inputs.boundary"},
              {"anchors.csv"},
              {"hexgrid.geojson"},
              {{"hex_edge_m", cfg.hex_edge_m}, {"tie_break", cfg.tie_break}},
              &run_grid};
    case Stage::Matrix:
      return {s,
              {"inputs.gtfs_dir", "inputs.streets_dir"},
              {"hexgrid.geojson"},
              {"matrix.csv"},
              {{"walk_speed_kmh", cfg.router.walk_speed_kmh},
               {"max_access_walk_m", cfg.router.max_access_walk_m},
               {"min_transfer_s", cfg.router.min_transfer_s},
               {"window_start_s", cfg.router.window_start_s},
               {"window_end_s", cfg.router.window_end_s},
               {"step_s", cfg.router.step_s},
               {"service_weekday", cfg.router.service_weekday}},
              &run_matrix};
    case Stage::Access:
      return {s,
              {"inputs.smi"},
              {"matrix.csv", "hexgrid.geojson", "anchors.csv"},
              {"hex_metrics.csv", "scatter.csv", "access_summary.json"},
              {{"threshold_auto", cfg.threshold_auto},
               {"threshold_min", cfg.threshold_auto ? 0.0 : cfg.threshold_min}},
              &run_access};
    case Stage::Lisa:
      return {s,
              {},
              {"hex_metrics.csv", "hexgrid.geojson"},
              {"lisa.geojson"},
              {{"permutations", cfg.permutations}, {"alpha", cfg.alpha}, {"seed", cfg.lisa_seed}},
              &run_lisa};
    case Stage::Stats:
      return {s,
              {"inputs.demographics"},
              {"lisa.geojson"},
              {"report.json"},
              {{"l2", cfg.l2}, {"tol", cfg.tol}, {"max_iter", cfg.max_iter}},
              &run_stats};
  }
  throw std::logic_error("unknown stage");
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Anchors: return "anchors";
    case Stage::Grid: return "grid";
    case Stage::Matrix: return "matrix";
    case Stage::Access: return "access";
    case Stage::Lisa: return "lisa";
    case Stage::Stats: return "stats";
  }
  return "?";
}

std::vector<Stage> all_stages() {
  return {Stage::Ingest, Stage::Anchors, Stage::Grid, Stage::Matrix,
          Stage::Access, Stage::Lisa, Stage::Stats};
}

json run_pipeline(const RunConfig& cfg, const std::vector<Stage>& stages) {
  // fail fast: every external input of every requested stage must exist
  std::vector<StageSpec> specs;
  for (Stage s : stages) specs.push_back(make_spec(cfg, s));
  for (const auto& spec : specs)
    for (const auto& key : spec.external_inputs) {
      const std::string path = input_key_path(cfg, key);
      if (path.empty())
        throw ConfigError("missing required config key '" + key + "' for stage " +
                          stage_name(spec.stage));
      if (!fs::exists(path))
        throw ConfigError("config key '" + key + "' points to a missing path: " + path);
    }

  fs::create_directories(cfg.out_dir);
  const std::string manifest_path = out_path(cfg, "manifest.json");
  json previous;
  if (fs::exists(manifest_path)) {
    try {
      previous = json::parse(read_file(manifest_path));
    } catch (...) {
      previous = json::object();
    }
  }
  auto previous_stage = [&](const std::string& name) -> const json* {
    if (!previous.contains("stages")) return nullptr;
    for (const auto& st : previous["stages"])
      if (st.at("name") == name) return &st;
    return nullptr;
  };

  json manifest;
  manifest["version"] = kVersion;
  manifest["config_hash"] = sha256_hex(sorted_json(cfg.canonical).dump());
  manifest["inputs"] = json::object();
  manifest["stages"] = json::array();
  manifest["outputs"] = json::object();
  manifest["dirty"] = false;

  // carry forward records of stages not selected this run
  if (previous.contains("stages"))
    for (const auto& st : previous["stages"]) {
      bool selected = false;
      for (const auto& spec : specs) selected |= st.at("name") == stage_name(spec.stage);
      if (!selected) manifest["stages"].push_back(st);
    }

  auto file_hash_cached = [cache = std::map<std::string, std::string>()](
                              const std::string& path) mutable -> const std::string& {
    auto it = cache.find(path);
    if (it == cache.end()) it = cache.emplace(path, sha256_file(path)).first;
    return it->second;
  };

  for (const auto& spec : specs) {
    const std::string name = stage_name(spec.stage);
    std::string key_material = sorted_json(spec.config_subset).dump();
    std::vector<std::string> input_files;
    for (const auto& k : spec.external_inputs)
      for (const auto& f : expand_input_files(cfg, k)) input_files.push_back(f);
    for (const auto& f : spec.intermediate_inputs) {
      const std::string p = out_path(cfg, f);
      if (!fs::exists(p))
        throw std::runtime_error("stage " + name + " needs " + f +
                                 "; run the upstream stage first");
      input_files.push_back(p);
    }
    for (const auto& f : input_files) {
      key_material += "|" + file_hash_cached(f);
      manifest["inputs"][f] = file_hash_cached(f);
    }
    const std::string stage_key = sha256_hex(key_material);

    json record = {{"name", name}, {"key", stage_key}, {"cache_hit", false}, {"wall_ms", 0.0}};
    const json* prev = previous_stage(name);
    bool hit = false;
    if (prev && prev->contains("key") && (*prev)["key"] == stage_key &&
        prev->contains("outputs")) {
      hit = true;
      for (const auto& [file, hash] : (*prev)["outputs"].items()) {
        const std::string p = out_path(cfg, file);
        if (!fs::exists(p) || sha256_file(p) != hash.get<std::string>()) {
          hit = false;
          break;
        }
      }
    }
    if (hit) {
      record["cache_hit"] = true;
      record["outputs"] = (*prev)["outputs"];
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        spec.run(cfg);
      } catch (...) {
        manifest["stages"].push_back(std::move(record));
        manifest["dirty"] = true;
        manifest["failed_stage"] = name;
        write_file(manifest_path, manifest.dump(1) + "\n");
        throw;
      }
      const auto t1 = std::chrono::steady_clock::now();
      record["wall_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      json outs = json::object();
      for (const auto& f : spec.outputs) outs[f] = sha256_file(out_path(cfg, f));
      record["outputs"] = std::move(outs);
    }
    for (const auto& [file, hash] : record["outputs"].items()) manifest["outputs"][file] = hash;
    manifest["stages"].push_back(std::move(record));
  }

  // keep the stage list in pipeline order even after partial runs
  std::sort(manifest["stages"].begin(), manifest["stages"].end(),
            [](const json& a, const json& b) {
              auto rank = [](const std::string& n) {
                int r = 0;
                for (Stage s : all_stages()) {
                  if (n == stage_name(s)) return r;
                  ++r;
                }
                return r;
              };
              return rank(a.at("name").get<std::string>()) <
                     rank(b.at("name").get<std::string>());
            });
  write_file(manifest_path, manifest.dump(1) + "\n");
  return manifest;
}

}  // namespace commutekit

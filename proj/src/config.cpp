#include "commutekit/config.hpp"

#include <filesystem>
#include <set>

#include "commutekit/util.hpp"

namespace commutekit {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::set<std::string> kKnownKeys = {
    "study.month",          "study.timezone",
    "ingest.naive_timestamps",
    "inputs.events",        "inputs.bts",
    "inputs.boundary",      "inputs.gtfs_dir",
    "inputs.streets_dir",   "inputs.smi",
    "inputs.demographics",
    "geo.hex_edge_m",       "geo.tie_break",
    "router.walk_speed_kmh", "router.max_access_walk_m",
    "router.min_transfer_s", "router.window_start",
    "router.window_end",    "router.step_s",
    "router.service_weekday",
    "access.threshold_min",
    "lisa.permutations",    "lisa.alpha",
    "lisa.seed",
    "stats.l2",             "stats.tol",
    "stats.max_iter",
    "threads",              "seed",
    "output.dir",
};

void collect_keys(const json& node, const std::string& prefix, std::vector<std::string>& out) {
  if (!node.is_object()) {
    out.push_back(prefix);
    return;
  }
  for (const auto& [key, child] : node.items())
    collect_keys(child, prefix.empty() ? key : prefix + "." + key, out);
}

json parse_scalar(const std::string& v) {
  // overrides arrive as text; keep JSON literals as-is, quote the rest
  json out = json::parse(v, nullptr, false);
  if (out.is_discarded() || out.is_object() || out.is_array()) return json(v);
  return out;
}

void set_path(json& root, const std::string& dotted, const json& value) {
  json* node = &root;
  const auto parts = split(dotted, '.');
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
}

template <typename T>
T get_or(const json& root, const std::string& dotted, T fallback) {
  const json* node = &root;
  for (const auto& part : split(dotted, '.')) {
    if (!node->is_object() || !node->contains(part)) return fallback;
    node = &(*node)[part];
  }
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + dotted + "' has the wrong type");
  }
}

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  return (base / path).lexically_normal().string();
}

}  // namespace

RunConfig RunConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must look like key=value: '" + ov + "'");
    set_path(root, ov.substr(0, eq), parse_scalar(ov.substr(eq + 1)));
  }

  std::vector<std::string> keys;
  collect_keys(root, "", keys);
  for (const auto& k : keys)
    if (kKnownKeys.find(k) == kKnownKeys.end())
      throw ConfigError("unknown config key '" + k + "'");

  RunConfig cfg;
  if (!root.contains("study") || !root["study"].contains("month"))
    throw ConfigError("missing required config key 'study.month'");
  cfg.month = YearMonth::parse(get_or<std::string>(root, "study.month", ""));
  cfg.timezone = get_or<std::string>(root, "study.timezone", "UTC");
  cfg.tz = TzOffset::parse(cfg.timezone);
  cfg.naive_timestamps = get_or<bool>(root, "ingest.naive_timestamps", true);

  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  cfg.events = resolve(base, get_or<std::string>(root, "inputs.events", ""));
  cfg.bts = resolve(base, get_or<std::string>(root, "inputs.bts", ""));
  cfg.boundary = resolve(base, get_or<std::string>(root, "inputs.boundary", ""));
  cfg.gtfs_dir = resolve(base, get_or<std::string>(root, "inputs.gtfs_dir", ""));
  cfg.streets_dir = resolve(base, get_or<std::string>(root, "inputs.streets_dir", ""));
  cfg.smi = resolve(base, get_or<std::string>(root, "inputs.smi", ""));
  cfg.demographics = resolve(base, get_or<std::string>(root, "inputs.demographics", ""));

  cfg.hex_edge_m = get_or<double>(root, "geo.hex_edge_m", 174.0);
  if (!(cfg.hex_edge_m > 0)) throw ConfigError("geo.hex_edge_m must be positive");
  cfg.tie_break = get_or<std::string>(root, "geo.tie_break", "min_bts_id");
  if (cfg.tie_break != "min_bts_id")
    throw ConfigError("geo.tie_break supports only 'min_bts_id'");

  cfg.router.walk_speed_kmh = get_or<double>(root, "router.walk_speed_kmh", 5.0);
  if (!(cfg.router.walk_speed_kmh > 0)) throw ConfigError("router.walk_speed_kmh must be positive");
  cfg.router.max_access_walk_m = get_or<double>(root, "router.max_access_walk_m", 1000.0);
  cfg.router.min_transfer_s = get_or<double>(root, "router.min_transfer_s", 0.0);
  cfg.router.window_start_s = parse_hms(get_or<std::string>(root, "router.window_start", "07:00"));
  cfg.router.window_end_s = parse_hms(get_or<std::string>(root, "router.window_end", "09:00"));
  if (cfg.router.window_end_s <= cfg.router.window_start_s)
    throw ConfigError("router.window_end must be after router.window_start");
  cfg.router.step_s = get_or<int>(root, "router.step_s", 600);
  if (cfg.router.step_s <= 0) throw ConfigError("router.step_s must be positive");
  cfg.router.service_weekday = get_or<std::string>(root, "router.service_weekday", "wednesday");

  if (root.contains("access") && root["access"].contains("threshold_min") &&
      !root["access"]["threshold_min"].is_string()) {
    cfg.threshold_auto = false;
    cfg.threshold_min = get_or<double>(root, "access.threshold_min", 0.0);
    if (!(cfg.threshold_min > 0)) throw ConfigError("access.threshold_min must be positive");
  } else {
    const std::string v = get_or<std::string>(root, "access.threshold_min", "auto");
    if (v != "auto") throw ConfigError("access.threshold_min must be a number or \"auto\"");
    cfg.threshold_auto = true;
  }

  cfg.seed = get_or<std::uint64_t>(root, "seed", 0);
  cfg.permutations = get_or<int>(root, "lisa.permutations", 999);
  if (cfg.permutations < 1) throw ConfigError("lisa.permutations must be >= 1");
  cfg.alpha = get_or<double>(root, "lisa.alpha", 0.05);
  if (!(cfg.alpha > 0 && cfg.alpha <= 1)) throw ConfigError("lisa.alpha must be in (0, 1]");
  cfg.lisa_seed = get_or<std::uint64_t>(root, "lisa.seed", cfg.seed);

  cfg.l2 = get_or<double>(root, "stats.l2", 1e-4);
  if (cfg.l2 < 0) throw ConfigError("stats.l2 must be >= 0");
  cfg.tol = get_or<double>(root, "stats.tol", 1e-8);
  cfg.max_iter = get_or<int>(root, "stats.max_iter", 200);

  cfg.threads = get_or<int>(root, "threads", 0);
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  cfg.out_dir = resolve(base, get_or<std::string>(root, "output.dir", "out"));

  cfg.canonical = root;
  return cfg;
}

}  // namespace commutekit

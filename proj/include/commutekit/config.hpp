#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commutekit/calendar.hpp"
#include "commutekit/router.hpp"

namespace commutekit {

// One config file drives the whole pipeline; flags override keys. Unknown
// keys are rejected so typos fail loudly. Relative paths resolve against the
// config file's directory.
struct RunConfig {
  // study
  YearMonth month;
  std::string timezone = "UTC";
  TzOffset tz;
  bool naive_timestamps = true;

  // inputs (resolved to absolute paths)
  std::string events, bts, boundary, gtfs_dir, streets_dir, smi, demographics;

  // geo
  double hex_edge_m = 174.0;
  std::string tie_break = "min_bts_id";

  RouterConfig router;

  // access
  bool threshold_auto = true;
  double threshold_min = 0.0;

  // lisa
  int permutations = 999;
  double alpha = 0.05;
  std::uint64_t lisa_seed = 0;

  // stats
  double l2 = 1e-4;
  double tol = 1e-8;
  int max_iter = 200;

  int threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  std::string out_dir;

  nlohmann::ordered_json canonical;  // normalized tree, hashed into the manifest

  // `overrides` are dotted key=value pairs applied before parsing,
  // e.g. "router.step_s=300".
  static RunConfig load(const std::string& path, const std::vector<std::string>& overrides = {});
};

}  // namespace commutekit

#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "commutekit/config.hpp"
#include "commutekit/pipeline.hpp"
#include "commutekit/synth.hpp"
#include "commutekit/util.hpp"

using namespace commutekit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ck_pipe_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// a micro city that runs the full pipeline in a couple of seconds
void micro_city(const std::string& dir, std::uint64_t seed = 42) {
  CitySpec spec;
  spec.seed = seed;
  spec.n_bts = 10;
  spec.n_users = 120;
  spec.n_routes = 2;
  spec.extent_km = 2.0;
  spec.hex_edge_m = 174.0;
  generate_city(spec, dir);
}

const std::vector<std::string> kResultFiles = {
    "hourly_counts.csv", "active_users.csv", "anchors.csv",  "rejected.csv",
    "hexgrid.geojson",   "matrix.csv",       "hex_metrics.csv", "scatter.csv",
    "access_summary.json", "lisa.geojson",   "report.json"};

}  // namespace

TEST_CASE("config validation fails fast with the offending key") {
  TempDir dir("cfgval");
  micro_city(dir.path.string());
  const std::string cfg_path = (dir.path / "config.json").string();

  // unknown keys are rejected
  CHECK_THROWS_WITH_AS(RunConfig::load(cfg_path, {"router.walkspeed=4"}),
                       doctest::Contains("unknown config key"), ConfigError);

  // missing input path is named before any stage runs
  const RunConfig broken =
      RunConfig::load(cfg_path, {"inputs.gtfs_dir=missing_gtfs", "output.dir=out_broken"});
  CHECK_THROWS_WITH_AS(run_pipeline(broken, all_stages()), doctest::Contains("inputs.gtfs_dir"),
                       ConfigError);
  CHECK_FALSE(fs::exists(dir.path / "out_broken" / "hourly_counts.csv"));
}

TEST_CASE("config type and range errors") {
  TempDir dir("cfgtype");
  micro_city(dir.path.string());
  const std::string cfg_path = (dir.path / "config.json").string();
  CHECK_THROWS_AS(RunConfig::load(cfg_path, {"lisa.alpha=2.0"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(cfg_path, {"router.step_s=0"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(cfg_path, {"geo.tie_break=random"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::load(cfg_path, {"study.month=March"}), ConfigError);
  const RunConfig ok = RunConfig::load(cfg_path, {"access.threshold_min=45.5"});
  CHECK_FALSE(ok.threshold_auto);
  CHECK(ok.threshold_min == 45.5);
}

TEST_CASE("full pipeline runs, caches, and reruns byte-identically") {
  TempDir dir("full");
  micro_city(dir.path.string());
  const std::string cfg_path = (dir.path / "config.json").string();

  const RunConfig cfg = RunConfig::load(cfg_path, {"threads=2"});
  const auto manifest = run_pipeline(cfg, all_stages());
  CHECK(manifest.at("dirty") == false);
  for (const auto& f : kResultFiles) CHECK(fs::exists(fs::path(cfg.out_dir) / f));
  for (const auto& st : manifest.at("stages")) CHECK(st.at("cache_hit") == false);

  // every output is listed in the manifest with its hash
  for (const auto& [file, hash] : manifest.at("outputs").items())
    CHECK(sha256_file((fs::path(cfg.out_dir) / file).string()) == hash.get<std::string>());

  // rerun with no changes: all cache hits, nothing recomputed
  const auto manifest2 = run_pipeline(cfg, all_stages());
  for (const auto& st : manifest2.at("stages")) CHECK(st.at("cache_hit") == true);

  // fresh output dir: byte-identical result files
  const RunConfig cfg_b = RunConfig::load(cfg_path, {"threads=2", "output.dir=out_b"});
  run_pipeline(cfg_b, all_stages());
  for (const auto& f : kResultFiles)
    CHECK(sha256_file((fs::path(cfg.out_dir) / f).string()) ==
          sha256_file((fs::path(cfg_b.out_dir) / f).string()));

  // thread count does not change any bytes
  const RunConfig cfg_c = RunConfig::load(cfg_path, {"threads=1", "output.dir=out_c"});
  run_pipeline(cfg_c, all_stages());
  for (const auto& f : kResultFiles)
    CHECK(sha256_file((fs::path(cfg.out_dir) / f).string()) ==
          sha256_file((fs::path(cfg_c.out_dir) / f).string()));
}

TEST_CASE("changing one config key re-runs only downstream stages") {
  TempDir dir("invalid");
  micro_city(dir.path.string());
  const std::string cfg_path = (dir.path / "config.json").string();
  const RunConfig cfg = RunConfig::load(cfg_path, {"threads=2"});
  run_pipeline(cfg, all_stages());

  const RunConfig tweaked =
      RunConfig::load(cfg_path, {"threads=2", "lisa.permutations=499"});
  const auto manifest = run_pipeline(tweaked, all_stages());
  for (const auto& st : manifest.at("stages")) {
    const std::string name = st.at("name").get<std::string>();
    if (name == "lisa" || name == "stats")
      CHECK(st.at("cache_hit") == false);
    else
      CHECK(st.at("cache_hit") == true);
  }
}

TEST_CASE("stage failure marks the manifest dirty and keeps partial outputs") {
  TempDir dir("dirty");
  micro_city(dir.path.string());
  const std::string cfg_path = (dir.path / "config.json").string();
  // corrupt the demographics input so only the last stage fails
  write_file((dir.path / "demographics.csv").string(),
             "hex_id,gender_ratio,immigrant,retired,minor,indigenous\n0:0,500,1,1,1,1\n");
  const RunConfig cfg = RunConfig::load(cfg_path, {"threads=2"});
  CHECK_THROWS(run_pipeline(cfg, all_stages()));
  const auto manifest =
      nlohmann::json::parse(read_file((fs::path(cfg.out_dir) / "manifest.json").string()));
  CHECK(manifest.at("dirty") == true);
  CHECK(manifest.at("failed_stage") == "stats");
  CHECK(fs::exists(fs::path(cfg.out_dir) / "lisa.geojson"));  // upstream results retained
}

TEST_CASE("running a stage without its upstream outputs is an error") {
  TempDir dir("upstream");
  micro_city(dir.path.string());
  const std::string cfg_path = (dir.path / "config.json").string();
  const RunConfig cfg = RunConfig::load(cfg_path, {"output.dir=fresh_out"});
  CHECK_THROWS_WITH_AS(run_pipeline(cfg, {Stage::Anchors}), doctest::Contains("upstream"),
                       std::runtime_error);
}

TEST_CASE("access summary exposes the auto threshold and inequality metrics") {
  TempDir dir("summary");
  micro_city(dir.path.string(), 7);
  const std::string cfg_path = (dir.path / "config.json").string();
  const RunConfig cfg = RunConfig::load(cfg_path, {"threads=2"});
  run_pipeline(cfg, all_stages());
  const auto summary =
      nlohmann::json::parse(read_file((fs::path(cfg.out_dir) / "access_summary.json").string()));
  CHECK(summary.at("threshold_auto") == true);
  CHECK(summary.at("threshold_min").get<double>() ==
        summary.at("citywide_mean_commute_min").get<double>());
  CHECK(summary.at("citywide_mean_commute_min").get<double>() > 0.0);
  CHECK(summary.at("palma_ratio").get<double>() > 0.0);
  const double g = summary.at("gini_commute").get<double>();
  CHECK(g >= 0.0);
  CHECK(g < 1.0);

  // explicit threshold is honored
  const RunConfig cfg2 =
      RunConfig::load(cfg_path, {"threads=2", "access.threshold_min=33.25", "output.dir=out_t"});
  run_pipeline(cfg2, all_stages());
  const auto s2 =
      nlohmann::json::parse(read_file((fs::path(cfg2.out_dir) / "access_summary.json").string()));
  CHECK(s2.at("threshold_min").get<double>() == 33.25);
  CHECK(s2.at("threshold_auto") == false);
}

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commutekit/config.hpp"

namespace commutekit {

enum class Stage { Ingest, Anchors, Grid, Matrix, Access, Lisa, Stats };

const char* stage_name(Stage s);
std::vector<Stage> all_stages();

// Runs the selected stages in pipeline order. Stages cache to disk: a stage
// re-runs only when its config subset or any input file hash changed since the
// manifest in the output directory was written. Returns the manifest. On a
// stage failure the manifest is still written, marked dirty, and the error is
// rethrown.
nlohmann::ordered_json run_pipeline(const RunConfig& cfg, const std::vector<Stage>& stages);

}  // namespace commutekit

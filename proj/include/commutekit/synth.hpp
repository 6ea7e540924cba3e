#pragma once

#include <cstdint>
#include <string>

namespace commutekit {

// Deterministic synthetic city with known ground truth: towers, users with
// planted home/work anchors, a street grid, a transit timetable, SMI and
// demographic fields with planted regional effects. Outputs are a pure
// function of (seed, parameters); per-artifact RNG streams keep earlier files
// stable when later generator stages change.
struct CitySpec {
  std::uint64_t seed = 42;
  int n_bts = 60;
  int n_users = 1000;
  int n_routes = 4;
  double noise = 0.0;          // probability an event's tower is scrambled
  double extent_km = 6.0;      // square study area side
  std::string month = "2023-03";
  std::string timezone = "UTC";
  double street_spacing_m = 400.0;
  double hex_edge_m = 174.0;   // used to key smi/demographics to the grid
};

// Writes events.csv, bts.csv, boundary.geojson, streets/{nodes,edges}.csv,
// gtfs/{stops,routes,trips,stop_times,calendar}.txt, smi.csv,
// demographics.csv, truth.json, and a ready-to-run config.json.
void generate_city(const CitySpec& spec, const std::string& out_dir);

}  // namespace commutekit

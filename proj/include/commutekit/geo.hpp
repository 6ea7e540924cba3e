#pragma once

#include <map>
#include <string>
#include <vector>

#include "commutekit/geometry.hpp"

namespace commutekit {

struct VoronoiCell {
  std::string bts_id;
  Ring polygon;  // projected meters, clipped to the study boundary
};

// Pointy-top axial hex cell; hex_id is "q:r".
struct HexCell {
  int q = 0;
  int r = 0;
  Vec2 center;               // projected meters
  std::string assigned_bts;  // empty until assignment
  double user_share = 0.0;
  double opportunity_share = 0.0;
};

std::string hex_id(int q, int r);
bool parse_hex_id(const std::string& id, int& q, int& r);
Vec2 hex_center(int q, int r, double edge_m);
Ring hex_ring(int q, int r, double edge_m);

// The six axial neighbor offsets.
extern const int kHexNeighborOffsets[6][2];

// Clipped Voronoi diagram: each cell is the intersection of the boundary with
// the half-planes closer to its site than to any other site. Throws if two
// sites coincide after projection.
std::vector<VoronoiCell> voronoi(const std::vector<std::pair<std::string, Vec2>>& sites,
                                 const Ring& boundary);

// Every hex whose polygon has positive-area overlap with the boundary.
std::vector<HexCell> build_hex_grid(const Ring& boundary, double edge_m);

// Assigns each hex to the cell covering the largest share of its area;
// overlap ties break to the smallest bts_id. Hexes with zero overlap with
// every cell are removed; returns how many were dropped.
int assign_hexes(std::vector<HexCell>& hexes, const std::vector<VoronoiCell>& cells,
                 double edge_m);

// Spreads per-tower mass evenly over the tower's hexes. Throws if a tower has
// mass but no hexes.
void disaggregate(const std::map<std::string, double>& home_users,
                  const std::map<std::string, double>& work_users, std::vector<HexCell>& hexes);

// hexgrid.geojson: FeatureCollection of hex polygons (WGS84) with properties
// hex_id, assigned_bts, user_share, opportunity_share; top-level "grid" member
// records edge_m and the projection origin so later stages can rebuild
// centroids without re-deriving the grid.
struct HexGrid {
  double edge_m = 0.0;
  double lon0 = 0.0, lat0 = 0.0;
  std::vector<HexCell> hexes;  // sorted by (q, r)
};

void save_hexgrid_geojson(const std::string& path, const HexGrid& grid, const Projection& proj);
HexGrid load_hexgrid_geojson(const std::string& path);

// Boundary input: GeoJSON Polygon (outer ring, no holes) or a MultiPolygon
// with a single part. Returns lon/lat vertex list.
std::vector<std::pair<double, double>> load_boundary_geojson(const std::string& path);

}  // namespace commutekit

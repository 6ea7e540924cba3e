#include "commutekit/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "commutekit/util.hpp"

namespace commutekit {

using json = nlohmann::ordered_json;

const int kHexNeighborOffsets[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};

std::string hex_id(int q, int r) { return std::to_string(q) + ":" + std::to_string(r); }

bool parse_hex_id(const std::string& id, int& q, int& r) {
  const auto pos = id.find(':');
  if (pos == std::string::npos) return false;
  try {
    q = std::stoi(id.substr(0, pos));
    r = std::stoi(id.substr(pos + 1));
  } catch (...) {
    return false;
  }
  return true;
}

Vec2 hex_center(int q, int r, double edge_m) {
  const double sqrt3 = 1.7320508075688772935;
  return {edge_m * sqrt3 * (q + 0.5 * r), edge_m * 1.5 * r};
}

Ring hex_ring(int q, int r, double edge_m) {
  const Vec2 c = hex_center(q, r, edge_m);
  Ring ring;
  ring.reserve(6);
  for (int k = 0; k < 6; ++k) {
    const double a = M_PI / 180.0 * (60.0 * k + 30.0);  // pointy-top
    ring.push_back({c.x + edge_m * std::cos(a), c.y + edge_m * std::sin(a)});
  }
  return ring;
}

std::vector<VoronoiCell> voronoi(const std::vector<std::pair<std::string, Vec2>>& sites,
                                 const Ring& boundary) {
  if (sites.empty()) throw std::runtime_error("voronoi: no sites");
  // duplicate sites make the half-plane construction degenerate
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if (distance(sites[i].second, sites[j].second) < 1e-9)
        throw std::runtime_error("voronoi: coincident sites '" + sites[i].first + "' and '" +
                                 sites[j].first + "'");

  std::vector<VoronoiCell> cells(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Vec2 si = sites[i].second;
    Ring cell = boundary;
    for (std::size_t j = 0; j < sites.size() && !cell.empty(); ++j) {
      if (j == i) continue;
      const Vec2 sj = sites[j].second;
      // keep the side closer to si: dot(q - mid, sj - si) <= 0
      const Vec2 mid{0.5 * (si.x + sj.x), 0.5 * (si.y + sj.y)};
      cell = clip_halfplane(cell, mid, sj - si);
    }
    cells[i] = {sites[i].first, std::move(cell)};
  }
  return cells;
}

std::vector<HexCell> build_hex_grid(const Ring& boundary, double edge_m) {
  if (edge_m <= 0) throw std::runtime_error("hex edge must be positive");
  Vec2 lo, hi;
  bounding_box(boundary, lo, hi);
  const double sqrt3 = 1.7320508075688772935;
  const int r_lo = static_cast<int>(std::floor(lo.y / (1.5 * edge_m))) - 1;
  const int r_hi = static_cast<int>(std::ceil(hi.y / (1.5 * edge_m))) + 1;
  std::vector<HexCell> out;
  for (int r = r_lo; r <= r_hi; ++r) {
    const int q_lo = static_cast<int>(std::floor(lo.x / (sqrt3 * edge_m) - 0.5 * r)) - 1;
    const int q_hi = static_cast<int>(std::ceil(hi.x / (sqrt3 * edge_m) - 0.5 * r)) + 1;
    for (int q = q_lo; q <= q_hi; ++q) {
      const Ring hex = hex_ring(q, r, edge_m);
      if (intersection_area(boundary, hex) > 1e-9)
        out.push_back(HexCell{q, r, hex_center(q, r, edge_m), "", 0.0, 0.0});
    }
  }
  std::sort(out.begin(), out.end(), [](const HexCell& a, const HexCell& b) {
    return a.q != b.q ? a.q < b.q : a.r < b.r;
  });
  return out;
}

int assign_hexes(std::vector<HexCell>& hexes, const std::vector<VoronoiCell>& cells,
                 double edge_m) {
  // bbox prefilter over cells
  std::vector<std::pair<Vec2, Vec2>> boxes(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].polygon.empty()) {
      boxes[c] = {{1e300, 1e300}, {-1e300, -1e300}};
      continue;
    }
    bounding_box(cells[c].polygon, boxes[c].first, boxes[c].second);
  }

  std::vector<HexCell> kept;
  kept.reserve(hexes.size());
  int dropped = 0;
  for (auto& hex : hexes) {
    const Ring ring = hex_ring(hex.q, hex.r, edge_m);
    Vec2 hlo, hhi;
    bounding_box(ring, hlo, hhi);
    double best_area = 0.0;
    const std::string* best_bts = nullptr;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (hlo.x > boxes[c].second.x || boxes[c].first.x > hhi.x || hlo.y > boxes[c].second.y ||
          boxes[c].first.y > hhi.y)
        continue;
      const double a = intersection_area(cells[c].polygon, ring);
      if (a > best_area || (a == best_area && a > 0.0 && best_bts && cells[c].bts_id < *best_bts)) {
        best_area = a;
        best_bts = &cells[c].bts_id;
      }
    }
    if (!best_bts || best_area <= 1e-9) {
      ++dropped;
      continue;
    }
    hex.assigned_bts = *best_bts;
    kept.push_back(hex);
  }
  hexes = std::move(kept);
  return dropped;
}

void disaggregate(const std::map<std::string, double>& home_users,
                  const std::map<std::string, double>& work_users, std::vector<HexCell>& hexes) {
  std::map<std::string, int> hex_count;
  for (const auto& h : hexes) ++hex_count[h.assigned_bts];
  for (const auto* counts : {&home_users, &work_users})
    for (const auto& [bts, n] : *counts)
      if (n > 0 && hex_count.find(bts) == hex_count.end())
        throw std::runtime_error("tower '" + bts +
                                 "' has anchored users but no assigned hexes; check the study "
                                 "boundary");
  for (auto& h : hexes) {
    const int k = hex_count[h.assigned_bts];
    const auto hu = home_users.find(h.assigned_bts);
    const auto wu = work_users.find(h.assigned_bts);
    h.user_share = hu == home_users.end() ? 0.0 : hu->second / k;
    h.opportunity_share = wu == work_users.end() ? 0.0 : wu->second / k;
  }
}

void save_hexgrid_geojson(const std::string& path, const HexGrid& grid, const Projection& proj) {
  json features = json::array();
  for (const auto& h : grid.hexes) {
    const Ring ring = hex_ring(h.q, h.r, grid.edge_m);
    json coords = json::array();
    json outer = json::array();
    for (const auto& p : ring) {
      const auto [lon, lat] = proj.inverse(p);
      outer.push_back({lon, lat});
    }
    const auto [lon0, lat0] = proj.inverse(ring[0]);
    outer.push_back({lon0, lat0});  // close the ring
    coords.push_back(outer);
    json f = {{"type", "Feature"},
              {"geometry", {{"type", "Polygon"}, {"coordinates", coords}}},
              {"properties",
               {{"hex_id", hex_id(h.q, h.r)},
                {"assigned_bts", h.assigned_bts},
                {"user_share", h.user_share},
                {"opportunity_share", h.opportunity_share}}}};
    features.push_back(std::move(f));
  }
  json fc = {{"type", "FeatureCollection"},
             {"grid", {{"edge_m", grid.edge_m}, {"lon0", grid.lon0}, {"lat0", grid.lat0}}},
             {"features", std::move(features)}};
  write_file(path, fc.dump() + "\n");
}

HexGrid load_hexgrid_geojson(const std::string& path) {
  const json fc = json::parse(read_file(path));
  HexGrid grid;
  grid.edge_m = fc.at("grid").at("edge_m").get<double>();
  grid.lon0 = fc.at("grid").at("lon0").get<double>();
  grid.lat0 = fc.at("grid").at("lat0").get<double>();
  for (const auto& f : fc.at("features")) {
    const auto& props = f.at("properties");
    HexCell h;
    if (!parse_hex_id(props.at("hex_id").get<std::string>(), h.q, h.r))
      throw std::runtime_error(path + ": bad hex_id");
    h.center = hex_center(h.q, h.r, grid.edge_m);
    h.assigned_bts = props.at("assigned_bts").get<std::string>();
    h.user_share = props.at("user_share").get<double>();
    h.opportunity_share = props.at("opportunity_share").get<double>();
    grid.hexes.push_back(std::move(h));
  }
  return grid;
}

std::vector<std::pair<double, double>> load_boundary_geojson(const std::string& path) {
  const json g = json::parse(read_file(path));
  const json* geom = &g;
  if (g.contains("type") && g.at("type") == "FeatureCollection") {
    if (g.at("features").empty()) throw std::runtime_error(path + ": empty FeatureCollection");
    geom = &g.at("features")[0].at("geometry");
  } else if (g.contains("type") && g.at("type") == "Feature") {
    geom = &g.at("geometry");
  }
  const std::string type = geom->at("type").get<std::string>();
  const json* rings = nullptr;
  if (type == "Polygon") {
    rings = &geom->at("coordinates");
  } else if (type == "MultiPolygon") {
    if (geom->at("coordinates").size() != 1)
      throw std::runtime_error(path + ": MultiPolygon boundaries with several parts are not supported");
    rings = &geom->at("coordinates")[0];
  } else {
    throw std::runtime_error(path + ": boundary must be a Polygon");
  }
  if (rings->size() > 1) throw std::runtime_error(path + ": boundary polygons with holes are not supported");
  std::vector<std::pair<double, double>> out;
  for (const auto& pt : (*rings)[0])
    out.emplace_back(pt[0].get<double>(), pt[1].get<double>());
  if (out.size() >= 2 && out.front() == out.back()) out.pop_back();  // drop closing vertex
  if (out.size() < 3) throw std::runtime_error(path + ": boundary ring needs at least 3 vertices");
  return out;
}

}  // namespace commutekit

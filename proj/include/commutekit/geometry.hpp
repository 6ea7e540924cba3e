#pragma once

#include <string>
#include <vector>

namespace commutekit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double distance(Vec2 a, Vec2 b);

// A simple polygon as an open ring of vertices (no repeated closing vertex).
using Ring = std::vector<Vec2>;

double ring_signed_area(const Ring& r);
inline double ring_area(const Ring& r) { return ring_signed_area(r) < 0 ? -ring_signed_area(r) : ring_signed_area(r); }
Vec2 ring_centroid(const Ring& r);
void bounding_box(const Ring& r, Vec2& lo, Vec2& hi);

// Keeps the side of the line through `p` with outward normal `n`, i.e. the
// points q with dot(q - p, n) <= 0. Sutherland-Hodgman step; the subject ring
// may be non-convex.
Ring clip_halfplane(const Ring& subject, Vec2 p, Vec2 n);

// Clips `subject` against a convex ring. The result may contain degenerate
// zero-width bridges when the subject is non-convex; its area is exact.
Ring clip_convex(const Ring& subject, const Ring& convex_clipper);

double intersection_area(const Ring& subject, const Ring& convex_clipper);

bool point_in_ring(const Ring& r, Vec2 p);

// Local equirectangular projection about a reference point. x grows east,
// y grows north, both in meters; one degree of latitude maps to 111,320 m.
class Projection {
 public:
  static constexpr double kMetersPerDegree = 111320.0;

  Projection() = default;
  Projection(double lon0, double lat0, Vec2 bbox_lo, Vec2 bbox_hi, double pad_m = 10000.0);

  // Construct from a WGS84 boundary ring (lon/lat degrees): projects about the
  // bounding-box center, bounds padded by 10 km.
  static Projection from_boundary(const std::vector<std::pair<double, double>>& lonlat);

  // Unbounded plane about a stored origin (for re-projecting saved grids).
  static Projection at(double lon0, double lat0);

  Vec2 project(double lon, double lat) const;  // throws on out-of-bounds points
  std::pair<double, double> inverse(Vec2 p) const;

  double lon0() const { return lon0_; }
  double lat0() const { return lat0_; }

 private:
  double lon0_ = 0.0, lat0_ = 0.0;
  double mx_ = kMetersPerDegree, my_ = kMetersPerDegree;
  Vec2 lo_{-1e18, -1e18}, hi_{1e18, 1e18};  // projected-meter bounds incl. padding
};

}  // namespace commutekit

#include "commutekit/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "commutekit/util.hpp"

namespace commutekit {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double ring_signed_area(const Ring& r) {
  const std::size_t n = r.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) s += cross(r[j], r[i]);
  return 0.5 * s;
}

Vec2 ring_centroid(const Ring& r) {
  const std::size_t n = r.size();
  if (n == 0) return {};
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double w = cross(r[j], r[i]);
    a += w;
    cx += (r[j].x + r[i].x) * w;
    cy += (r[j].y + r[i].y) * w;
  }
  if (std::abs(a) < 1e-30) {  // degenerate: fall back to vertex mean
    for (const auto& p : r) {
      cx += p.x;
      cy += p.y;
    }
    return {cx / n, cy / n};
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

void bounding_box(const Ring& r, Vec2& lo, Vec2& hi) {
  lo = {1e300, 1e300};
  hi = {-1e300, -1e300};
  for (const auto& p : r) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
}

Ring clip_halfplane(const Ring& subject, Vec2 p, Vec2 n) {
  Ring out;
  const std::size_t m = subject.size();
  if (m == 0) return out;
  out.reserve(m + 4);
  auto side = [&](Vec2 q) { return dot(q - p, n); };
  for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
    const Vec2 a = subject[j], b = subject[i];
    const double da = side(a), db = side(b);
    const bool ina = da <= 0.0, inb = db <= 0.0;
    if (ina != inb) {
      const double t = da / (da - db);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    if (inb) out.push_back(b);
  }
  return out;
}

Ring clip_convex(const Ring& subject, const Ring& clipper) {
  Ring cur = subject;
  const std::size_t m = clipper.size();
  const double orient = ring_signed_area(clipper);
  for (std::size_t i = 0, j = m - 1; i < m && !cur.empty(); j = i++) {
    const Vec2 a = clipper[j], b = clipper[i];
    Vec2 edge = b - a;
    // outward normal depends on clipper orientation
    Vec2 n = orient > 0 ? Vec2{edge.y, -edge.x} : Vec2{-edge.y, edge.x};
    cur = clip_halfplane(cur, a, n);
  }
  return cur;
}

double intersection_area(const Ring& subject, const Ring& convex_clipper) {
  if (subject.empty() || convex_clipper.empty()) return 0.0;
  Vec2 slo, shi, clo, chi;
  bounding_box(subject, slo, shi);
  bounding_box(convex_clipper, clo, chi);
  if (slo.x > chi.x || clo.x > shi.x || slo.y > chi.y || clo.y > shi.y) return 0.0;
  return ring_area(clip_convex(subject, convex_clipper));
}

bool point_in_ring(const Ring& r, Vec2 p) {
  // even-odd rule
  bool inside = false;
  const std::size_t n = r.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = r[j], b = r[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double xint = b.x + (p.y - b.y) / (a.y - b.y) * (a.x - b.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

Projection::Projection(double lon0, double lat0, Vec2 bbox_lo, Vec2 bbox_hi, double pad_m)
    : lon0_(lon0), lat0_(lat0) {
  mx_ = kMetersPerDegree * std::cos(lat0 * M_PI / 180.0);
  my_ = kMetersPerDegree;
  lo_ = {bbox_lo.x - pad_m, bbox_lo.y - pad_m};
  hi_ = {bbox_hi.x + pad_m, bbox_hi.y + pad_m};
}

Projection Projection::from_boundary(const std::vector<std::pair<double, double>>& lonlat) {
  if (lonlat.empty()) throw std::runtime_error("empty boundary");
  double lon_lo = 1e300, lon_hi = -1e300, lat_lo = 1e300, lat_hi = -1e300;
  for (const auto& [lon, lat] : lonlat) {
    lon_lo = std::min(lon_lo, lon);
    lon_hi = std::max(lon_hi, lon);
    lat_lo = std::min(lat_lo, lat);
    lat_hi = std::max(lat_hi, lat);
  }
  const double lon0 = 0.5 * (lon_lo + lon_hi), lat0 = 0.5 * (lat_lo + lat_hi);
  const double mx = kMetersPerDegree * std::cos(lat0 * M_PI / 180.0);
  const Vec2 lo{(lon_lo - lon0) * mx, (lat_lo - lat0) * kMetersPerDegree};
  const Vec2 hi{(lon_hi - lon0) * mx, (lat_hi - lat0) * kMetersPerDegree};
  return Projection(lon0, lat0, lo, hi);
}

Projection Projection::at(double lon0, double lat0) {
  return Projection(lon0, lat0, {-1e300, -1e300}, {1e300, 1e300}, 0.0);
}

Vec2 Projection::project(double lon, double lat) const {
  const Vec2 p{(lon - lon0_) * mx_, (lat - lat0_) * my_};
  if (p.x < lo_.x || p.x > hi_.x || p.y < lo_.y || p.y > hi_.y)
    throw std::runtime_error("point out of study bounds: lon=" + fmt_double(lon) +
                             " lat=" + fmt_double(lat));
  return p;
}

std::pair<double, double> Projection::inverse(Vec2 p) const {
  return {lon0_ + p.x / mx_, lat0_ + p.y / my_};
}

}  // namespace commutekit

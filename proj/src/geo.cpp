#include "floodgen/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace floodgen {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

Projection::Projection(LatLon ref) : ref_(ref), cos_ref_(std::cos(ref.lat * kDegToRad)) {}

Vec2 Projection::to_plane(LatLon p) const {
  return {(p.lon - ref_.lon) * kDegToRad * cos_ref_ * kEarthRadiusFt,
          (p.lat - ref_.lat) * kDegToRad * kEarthRadiusFt};
}

LatLon Projection::to_latlon(Vec2 v) const {
  return {ref_.lat + v.y / kEarthRadiusFt / kDegToRad,
          ref_.lon + v.x / (kEarthRadiusFt * cos_ref_) / kDegToRad};
}

double ring_area(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

Vec2 ring_centroid(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n == 0) return {};
  const double a = ring_area(ring);
  if (n < 3 || std::fabs(a) < 1e-30) {
    Vec2 m{};
    for (const Vec2& p : ring) {
      m.x += p.x;
      m.y += p.y;
    }
    m.x /= static_cast<double>(n);
    m.y /= static_cast<double>(n);
    return m;
  }
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % n];
    const double cross = p.x * q.y - q.x * p.y;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool point_in_ring(Vec2 p, std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double t = (p.y - a.y) / (b.y - a.y);
      if (p.x < a.x + t * (b.x - a.x)) inside = !inside;
    }
  }
  return inside;
}

Ring convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  Ring hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Ring clip_halfplane(const Ring& poly, Vec2 n, double c) {
  Ring out;
  const std::size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 2);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = n.x * a.x + n.y * a.y - c;
    const double db = n.x * b.x + n.y * b.y - c;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

Ring voronoi_cell(std::span<const Vec2> sites, std::size_t i, const Ring& boundary) {
  Ring cell = boundary;
  const Vec2 s = sites[i];
  for (std::size_t j = 0; j < sites.size() && !cell.empty(); ++j) {
    if (j == i) continue;
    const Vec2 o = sites[j];
    // |p - s| <= |p - o|  <=>  dot(p, o - s) <= (|o|^2 - |s|^2) / 2
    const Vec2 n{o.x - s.x, o.y - s.y};
    const double c = 0.5 * (o.x * o.x + o.y * o.y - s.x * s.x - s.y * s.y);
    cell = clip_halfplane(cell, n, c);
  }
  return cell;
}

}  // namespace floodgen

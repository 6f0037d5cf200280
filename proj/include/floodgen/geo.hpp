#pragma once

#include <span>
#include <vector>

namespace floodgen {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr double kEarthRadiusFt = 20925646.325;  // WGS84 mean, feet

// Equirectangular projection about a reference point. Adequate at county
// scale; x/y are in feet.
class Projection {
public:
  Projection() = default;
  explicit Projection(LatLon ref);

  Vec2 to_plane(LatLon p) const;
  LatLon to_latlon(Vec2 v) const;
  LatLon reference() const { return ref_; }

private:
  LatLon ref_{};
  double cos_ref_ = 1.0;
};

using Ring = std::vector<Vec2>;  // open ring, implicit closure

double ring_area(std::span<const Vec2> ring);  // signed shoelace
Vec2 ring_centroid(std::span<const Vec2> ring);
bool point_in_ring(Vec2 p, std::span<const Vec2> ring);  // even-odd rule

// Andrew monotone chain; returns CCW hull.
Ring convex_hull(std::vector<Vec2> points);

// Sutherland-Hodgman clip of `poly` against half-plane dot(n, p) <= c.
Ring clip_halfplane(const Ring& poly, Vec2 n, double c);

// Voronoi cell of sites[i] clipped to `boundary`, built by intersecting
// bisector half-planes. O(sites^2) overall; intended for desk-scale meshes.
Ring voronoi_cell(std::span<const Vec2> sites, std::size_t i, const Ring& boundary);

}  // namespace floodgen

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floodgen/geo.hpp"

namespace floodgen {

struct Cell {
  std::int32_t cell_id = 0;
  LatLon centroid{};
  std::vector<LatLon> polygon;  // open ring, may be empty before meshing
  double area_sqft = 0.0;
  std::int32_t watershed_id = 0;
  bool channel = false;
  double elevation_ft = 0.0;
};

// Immutable study-area geometry: cells, watershed membership, projected
// centroids and the bounding region used for point assignment. Safe for
// concurrent read-only use once constructed.
class Mesh {
public:
  // `boundary` falls back to the convex hull of all polygon vertices (or
  // centroids when no polygons exist). watershed_count 0 means derive from
  // the largest id present.
  static Mesh from_cells(std::vector<Cell> cells, std::int32_t watershed_count = 0,
                         std::vector<LatLon> boundary = {});

  // Voronoi mesh from centroid sites, clipped to `boundary` (default: the
  // sites' convex hull padded by half the median neighbor spacing).
  static Mesh from_centroids(std::vector<Cell> sites,
                             std::vector<LatLon> boundary = {});

  static Mesh load_geojson(const std::string& path);
  void save_geojson(const std::string& path) const;

  std::size_t cell_count() const { return cells_.size(); }
  std::int32_t watershed_count() const { return watershed_count_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<LatLon>& boundary() const { return boundary_; }
  const Projection& projection() const { return proj_; }
  Vec2 centroid_xy(std::size_t i) const { return centroid_xy_[i]; }
  std::span<const Vec2> centroids_xy() const { return centroid_xy_; }
  const Ring& boundary_xy() const { return boundary_xy_; }
  double watershed_area(std::int32_t w) const { return watershed_area_[w]; }
  std::span<const std::int32_t> watershed_cells(std::int32_t w) const;

  bool contains(LatLon p) const;

  // Nearest projected centroid; PointOutsideStudyArea outside the boundary.
  std::int32_t assign_point(LatLon p) const;

  // Hash over cell ids + centroids; persisted artifacts carry it so stale
  // combinations are rejected.
  const std::string& fingerprint() const { return fingerprint_; }

private:
  void finalize();

  std::vector<Cell> cells_;
  std::int32_t watershed_count_ = 0;
  std::vector<LatLon> boundary_;
  Projection proj_;
  std::vector<Vec2> centroid_xy_;
  Ring boundary_xy_;
  std::vector<double> watershed_area_;
  std::vector<std::int32_t> ws_cells_flat_;
  std::vector<std::size_t> ws_cells_offset_;
  std::string fingerprint_;
};

std::int32_t assign_point_to_cell(LatLon point, const Mesh& mesh);

// One precipitation-flood event. Per-cell vectors are indexed by cell_id;
// depth_ft is empty until depths exist (training data or synthesis output).
struct StormEvent {
  std::int64_t event_id = 0;
  double duration_h = 0.0;
  std::vector<double> cumulative_in;
  std::vector<double> peak_in;
  std::vector<double> depth_ft;

  bool has_depth() const { return !depth_ft.empty(); }
};

double event_mean_depth(const StormEvent& event);

std::vector<StormEvent> load_events_csv(const std::string& path, const Mesh& mesh);
void save_events_csv(const std::string& path, std::span<const StormEvent> events);

struct SplitConfig {
  std::array<int, 3> ratio{2, 4, 1};
  double validation_fraction = 0.20;
  std::array<double, 2> class_bounds_in{2.0, 6.0};
  std::size_t train_pool = 0;  // 0 = largest pool the ratio allows
  std::uint64_t seed = 0;
};

struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::array<std::size_t, 3> class_counts{0, 0, 0};
};

// Classifies events by mean depth (inches), draws a ratio-proportional
// training pool, carves a stratified validation subset out of it, and
// leaves the remainder as test. Deterministic given seed.
SplitResult stratified_split(std::span<const StormEvent> events, const SplitConfig& cfg);

void save_split_json(const std::string& path, const SplitResult& split,
                     std::span<const StormEvent> events);
SplitResult load_split_json(const std::string& path, std::span<const StormEvent> events);

}  // namespace floodgen

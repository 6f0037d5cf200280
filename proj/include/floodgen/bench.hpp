#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "floodgen/mesh.hpp"
#include "floodgen/point_generator.hpp"

namespace floodgen {

// Synthetic end-to-end benchmark: a jittered-grid Voronoi mesh whose cells
// carry hidden per-cell depth-response coefficients, plus storm events whose
// depths follow those responses exactly. Per-event precipitation amplitude is
// tuned so the event mean depths populate all three split classes.
struct BenchConfig {
  int grid_x = 16;
  int grid_y = 15;
  int watersheds = 4;
  int n_events = 90;
  std::uint64_t seed = 91;
  double origin_lat = 29.8;
  double origin_lon = -95.4;
  double spacing_deg = 0.01;
};

struct Benchmark {
  Mesh mesh;
  std::vector<StormEvent> events;
};

Benchmark make_benchmark(const BenchConfig& cfg = {});

// One point record per (event, cell): the cell centroid with that cell's
// precipitation values; feeds generator training and pool construction.
PointCloud points_from_events(const Mesh& mesh, std::span<const StormEvent> events);

// Training records for generator tests: latent-correlated (cumulative, peak,
// duration) triples at uniform in-area locations, all satisfying the sampling
// constraints by construction.
PointCloud make_correlated_points(const Mesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace floodgen

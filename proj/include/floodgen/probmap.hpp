#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "floodgen/event_synth.hpp"
#include "floodgen/mesh.hpp"

namespace floodgen {

struct ProbabilityMap {
  double threshold_ft = 0.0;
  std::size_t n_events = 0;
  std::string mesh_fingerprint;
  std::vector<double> probability;  // per cell
};

// Per cell, the fraction of events whose depth reaches the threshold
// (inclusive >=).
ProbabilityMap probability_map(const Mesh& mesh, std::span<const SyntheticEvent> events,
                               double threshold_ft);

// Same reduction over bare depth fields (one vector per event).
ProbabilityMap probability_map_from_depths(std::span<const std::vector<double>> depths,
                                           double threshold_ft,
                                           const std::string& mesh_fingerprint = "");

void save_probmap_geojson(const std::string& path, const Mesh& mesh,
                          const ProbabilityMap& map);
std::vector<double> load_probmap_geojson(const std::string& path);
void save_probmap_csv(const std::string& path, const ProbabilityMap& map);
void save_probmap_png(const std::string& path, const Mesh& mesh, const ProbabilityMap& map,
                      int raster_width = 1024);

}  // namespace floodgen

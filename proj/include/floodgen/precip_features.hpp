#pragma once

#include <span>
#include <string>
#include <vector>

#include "floodgen/mesh.hpp"

namespace floodgen {

// 1 when precipitation strictly exceeds the heavy threshold, else 0.
int heavy_indicator(double p_in, double threshold_in = 2.0);

// Fraction of a cell set, weighted by area, whose value exceeds the heavy
// threshold (strictly). `values` is indexed by cell_id.
double heavy_ratio(const Mesh& mesh, std::span<const std::int32_t> cell_ids,
                   std::span<const double> values, double threshold_in = 2.0);

// Per-watershed heavy ratios for one value field; result has one entry per
// watershed.
std::vector<double> watershed_ratios(const Mesh& mesh, std::span<const double> values,
                                     double threshold_in = 2.0);

struct EventRatios {
  std::vector<double> hcpr;  // cumulative-based, per watershed
  std::vector<double> hppr;  // peak-based, per watershed
};

EventRatios event_ratios(const Mesh& mesh, const StormEvent& event,
                         double threshold_in = 2.0);

// Feature layouts for the two estimator variants. The cell-wise row is
// (cumulative, peak, duration, hcpr[0..W), hppr[0..W)); the universal row is
// (cumulative, peak, duration, channel, elevation).
std::size_t cellwise_feature_count(const Mesh& mesh);
inline constexpr std::size_t kUniversalFeatureCount = 5;

std::vector<std::string> cellwise_feature_names(const Mesh& mesh);
std::vector<std::string> universal_feature_names();

void cellwise_features(const Mesh& mesh, const StormEvent& event, const EventRatios& ratios,
                       std::int32_t cell_id, std::span<double> out);
void universal_features(const Mesh& mesh, const StormEvent& event, std::int32_t cell_id,
                        std::span<double> out);

}  // namespace floodgen

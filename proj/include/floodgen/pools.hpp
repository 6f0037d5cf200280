#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "floodgen/mesh.hpp"
#include "floodgen/point_generator.hpp"

namespace floodgen {

enum class Lmh : int { low = 0, medium = 1, high = 2 };

char lmh_letter(Lmh c);
Lmh lmh_from_letter(char c);

struct FeatureThreshold {
  double mu = 0.0;
  double sigma = 0.0;
  double b1 = 0.0;  // low/medium boundary, clamped at 0
  double b2 = 0.0;  // medium/high boundary
  bool widened = false;
};

// Index order mirrors point features: cumulative, peak, duration.
struct ThresholdSet {
  double theta1 = 0.5;
  double theta2 = 0.5;
  std::array<FeatureThreshold, 3> feature;
};

FeatureThreshold compute_feature_threshold(std::span<const double> values, double theta1,
                                           double theta2);
ThresholdSet compute_thresholds(std::span<const StormEvent> events, const Mesh& mesh,
                                std::int32_t cell_id, double theta1 = 0.5,
                                double theta2 = 0.5);

Lmh classify(double value, const FeatureThreshold& t);

// Bucket index packs the three classes as cum*9 + peak*3 + dur.
inline constexpr std::size_t kBucketCount = 27;
std::size_t bucket_index(Lmh cum, Lmh peak, Lmh dur);
std::size_t bucket_duration_class(std::size_t bucket);

struct CellPool {
  std::int32_t cell_id = 0;
  ThresholdSet thresholds;
  std::array<std::vector<std::uint32_t>, kBucketCount> buckets;
  std::size_t indexed() const {
    std::size_t n = 0;
    for (const auto& b : buckets) n += b.size();
    return n;
  }
};

struct PoolSet {
  std::string mesh_fingerprint;
  double theta1 = 0.5;
  double theta2 = 0.5;
  std::vector<CellPool> cells;  // indexed by cell_id
  std::uint64_t skipped_outside = 0;

  // Union of every bucket across cells, in (cell, bucket, cloud-order) order,
  // with each entry's duration class; backs uniform global-duration draws.
  std::vector<std::uint32_t> union_points;
  std::vector<std::uint8_t> union_dur_class;

  std::size_t total_indexed() const { return union_points.size(); }
  void rebuild_union();
};

PoolSet build_pools(const PointCloud& cloud, const Mesh& mesh,
                    std::span<const ThresholdSet> thresholds, int workers = 0);

void save_pools(const std::string& csv_path, const std::string& manifest_path,
                const PoolSet& pools);
PoolSet load_pools(const std::string& csv_path, const std::string& manifest_path,
                   const Mesh& mesh);

}  // namespace floodgen

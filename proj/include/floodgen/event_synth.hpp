#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "floodgen/depth_estimator.hpp"
#include "floodgen/mesh.hpp"
#include "floodgen/pools.hpp"
#include "floodgen/precip_features.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

struct KnnRule {
  double slope = 10.0 / 3.0;  // K grows linearly with duration
  int k_min = 5;
  int k_max = 100;
};

int knn_k_for_duration(double duration_h, const KnnRule& rule = {});

// Per-cell neighbor ordering by centroid distance (self first), ties broken
// by smaller cell_id. Built once, shared by every smoothing pass.
class KnnIndex {
 public:
  explicit KnnIndex(const Mesh& mesh);
  std::span<const std::int32_t> neighbors(std::size_t cell) const {
    return {order_.data() + cell * n_, n_};
  }
  std::size_t cell_count() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::int32_t> order_;
};

std::vector<double> knn_smooth(const KnnIndex& index, std::span<const double> values, int k);
std::vector<double> knn_smooth(const Mesh& mesh, std::span<const double> values, int k);

struct GlobalDuration {
  double duration_h = 0.0;
  Lmh dur_class = Lmh::low;
};

GlobalDuration sample_global_duration(const PoolSet& pools, const PointCloud& cloud,
                                      Rng& rng);

struct CellDraw {
  double cumulative_in = 0.0;
  double peak_in = 0.0;
  bool widened = false;       // fell back from the 9 duration-matched buckets to all 27
  bool dry_fallback = false;  // every bucket empty; the draw is (0, 0)
};

CellDraw sample_cell_features(const CellPool& pool, const PointCloud& cloud,
                              Lmh duration_class, Rng& rng);

struct SyntheticEvent {
  std::int64_t event_id = 0;
  std::uint64_t seed = 0;
  double duration_h = 0.0;
  Lmh duration_class = Lmh::low;
  int k_used = 0;
  std::vector<double> raw_cumulative_in, raw_peak_in;
  std::vector<double> cumulative_in, peak_in;  // smoothed, peak repaired <= cumulative
  EventRatios ratios;
  std::vector<double> depth_ft;
  std::uint32_t widened_cells = 0;
  std::uint32_t dry_fallback_cells = 0;
  std::string mesh_fingerprint;
};

SyntheticEvent synthesize_event(const PoolSet& pools, const PointCloud& cloud,
                                const Mesh& mesh, const CellwiseEstimator& estimator,
                                std::uint64_t seed, const KnnRule& rule = {});

std::vector<SyntheticEvent> generate_batch(const PoolSet& pools, const PointCloud& cloud,
                                           const Mesh& mesh,
                                           const CellwiseEstimator& estimator,
                                           std::size_t n, std::uint64_t base_seed,
                                           const KnnRule& rule = {}, int workers = 0);

void save_synthetic_csv(const std::string& path, const SyntheticEvent& event);
std::vector<double> load_synthetic_depths_csv(const std::string& path,
                                              std::size_t n_cells);
void save_batch_manifest(const std::string& path, std::span<const SyntheticEvent> events,
                         std::uint64_t base_seed,
                         std::span<const std::string> event_files);

}  // namespace floodgen

#include "floodgen/event_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "floodgen/common.hpp"
#include "floodgen/csv.hpp"
#include "floodgen/parallel.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

namespace {
// Stream id for the event-level duration draw; cell streams use the cell id,
// which never collides with this.
constexpr std::uint64_t kDurationStream = ~0ull;
}  // namespace

int knn_k_for_duration(double duration_h, const KnnRule& rule) {
  if (duration_h < 1.0) fail(errc::bad_data, "duration must be >= 1 h");
  const auto k = static_cast<int>(std::llround(rule.slope * duration_h));
  return std::clamp(k, rule.k_min, rule.k_max);
}

KnnIndex::KnnIndex(const Mesh& mesh) : n_(mesh.cell_count()) {
  order_.resize(n_ * n_);
  const auto& xy = mesh.centroids_xy();
  std::vector<std::pair<double, std::int32_t>> dist(n_);
  for (std::size_t c = 0; c < n_; ++c) {
    for (std::size_t o = 0; o < n_; ++o) {
      const double dx = xy[o].x - xy[c].x, dy = xy[o].y - xy[c].y;
      dist[o] = {dx * dx + dy * dy, static_cast<std::int32_t>(o)};
    }
    std::sort(dist.begin(), dist.end());
    for (std::size_t o = 0; o < n_; ++o) order_[c * n_ + o] = dist[o].second;
  }
}

std::vector<double> knn_smooth(const KnnIndex& index, std::span<const double> values, int k) {
  if (k < 1) fail(errc::bad_config, "smoothing needs K >= 1");
  const std::size_t n = index.cell_count();
  if (values.size() != n) fail(errc::length_mismatch, "value field does not cover all cells");
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::vector<double> out(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto nb = index.neighbors(c);
    double s = 0.0;
    for (std::size_t i = 0; i < kk; ++i) s += values[static_cast<std::size_t>(nb[i])];
    out[c] = s / static_cast<double>(kk);
  }
  return out;
}

std::vector<double> knn_smooth(const Mesh& mesh, std::span<const double> values, int k) {
  return knn_smooth(KnnIndex(mesh), values, k);
}

GlobalDuration sample_global_duration(const PoolSet& pools, const PointCloud& cloud,
                                      Rng& rng) {
  if (pools.union_points.empty())
    fail(errc::empty_pool, "aggregated pool holds no indexed points");
  const std::size_t j = rng.next_below(pools.union_points.size());
  return {cloud.cols[4][pools.union_points[j]],
          static_cast<Lmh>(pools.union_dur_class[j])};
}

CellDraw sample_cell_features(const CellPool& pool, const PointCloud& cloud,
                              Lmh duration_class, Rng& rng) {
  // Uniform over the union of eligible buckets, so a bucket's weight is its
  // occupancy. Returns the cloud index of the chosen point, -1 when empty.
  const auto pick_index = [&](bool match_duration) -> std::int64_t {
    std::size_t total = 0;
    for (std::size_t b = 0; b < kBucketCount; ++b) {
      if (match_duration &&
          bucket_duration_class(b) != static_cast<std::size_t>(duration_class))
        continue;
      total += pool.buckets[b].size();
    }
    if (total == 0) return -1;
    std::size_t j = rng.next_below(total);
    for (std::size_t b = 0; b < kBucketCount; ++b) {
      if (match_duration &&
          bucket_duration_class(b) != static_cast<std::size_t>(duration_class))
        continue;
      if (j < pool.buckets[b].size())
        return static_cast<std::int64_t>(pool.buckets[b][j]);
      j -= pool.buckets[b].size();
    }
    return -1;
  };
  CellDraw draw;
  std::int64_t idx = pick_index(true);
  if (idx < 0) {
    draw.widened = true;
    idx = pick_index(false);
  }
  if (idx < 0) {
    draw.dry_fallback = true;
    return draw;
  }
  draw.cumulative_in = cloud.cols[2][static_cast<std::size_t>(idx)];
  draw.peak_in = cloud.cols[3][static_cast<std::size_t>(idx)];
  return draw;
}

namespace {

SyntheticEvent synthesize_with_index(const PoolSet& pools, const PointCloud& cloud,
                                     const Mesh& mesh, const CellwiseEstimator& estimator,
                                     const KnnIndex& index, std::uint64_t seed,
                                     const KnnRule& rule) {
  if (pools.mesh_fingerprint != mesh.fingerprint() ||
      estimator.mesh_fingerprint != mesh.fingerprint())
    fail(errc::mesh_fingerprint_mismatch,
         "pools and estimator must be built on the active mesh");
  const std::size_t n = mesh.cell_count();

  SyntheticEvent ev;
  ev.seed = seed;
  ev.mesh_fingerprint = mesh.fingerprint();

  Rng dur_rng(seed, kDurationStream);
  const GlobalDuration g = sample_global_duration(pools, cloud, dur_rng);
  ev.duration_h = g.duration_h;
  ev.duration_class = g.dur_class;
  ev.k_used = knn_k_for_duration(g.duration_h, rule);

  ev.raw_cumulative_in.resize(n);
  ev.raw_peak_in.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    Rng cell_rng(seed, static_cast<std::uint64_t>(c));
    const CellDraw d = sample_cell_features(pools.cells[c], cloud, g.dur_class, cell_rng);
    if (d.widened) ++ev.widened_cells;
    if (d.dry_fallback) ++ev.dry_fallback_cells;
    ev.raw_cumulative_in[c] = d.cumulative_in;
    ev.raw_peak_in[c] = d.peak_in;
  }

  ev.cumulative_in = knn_smooth(index, ev.raw_cumulative_in, ev.k_used);
  ev.peak_in = knn_smooth(index, ev.raw_peak_in, ev.k_used);
  for (std::size_t c = 0; c < n; ++c)
    ev.peak_in[c] = std::min(ev.peak_in[c], ev.cumulative_in[c]);

  StormEvent precip;
  precip.event_id = ev.event_id;
  precip.duration_h = ev.duration_h;
  precip.cumulative_in = ev.cumulative_in;
  precip.peak_in = ev.peak_in;
  ev.ratios = event_ratios(mesh, precip);

  const std::size_t n_feat = cellwise_feature_count(mesh);
  ev.depth_ft.resize(n);
  std::vector<double> row(n_feat);
  for (std::size_t c = 0; c < n; ++c) {
    cellwise_features(mesh, precip, ev.ratios, static_cast<std::int32_t>(c), row);
    ev.depth_ft[c] = estimator.models[c].predict(row);
  }
  return ev;
}

}  // namespace

SyntheticEvent synthesize_event(const PoolSet& pools, const PointCloud& cloud,
                                const Mesh& mesh, const CellwiseEstimator& estimator,
                                std::uint64_t seed, const KnnRule& rule) {
  return synthesize_with_index(pools, cloud, mesh, estimator, KnnIndex(mesh), seed, rule);
}

std::vector<SyntheticEvent> generate_batch(const PoolSet& pools, const PointCloud& cloud,
                                           const Mesh& mesh,
                                           const CellwiseEstimator& estimator,
                                           std::size_t n, std::uint64_t base_seed,
                                           const KnnRule& rule, int workers) {
  if (n < 1) fail(errc::bad_config, "batch size must be >= 1");
  const KnnIndex index(mesh);
  std::vector<SyntheticEvent> events(n);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      events[i] = synthesize_with_index(pools, cloud, mesh, estimator, index,
                                        mix_seed(base_seed, i), rule);
      events[i].event_id = static_cast<std::int64_t>(i);
    } catch (const Error& e) {
      fail(e.code(), "event " + std::to_string(i) + ": " + e.what());
    }
  });
  return events;
}

void save_synthetic_csv(const std::string& path, const SyntheticEvent& event) {
  std::ostringstream out;
  out << "cell_id,cumulative_in,peak_in,duration_h,depth_ft\n";
  for (std::size_t c = 0; c < event.depth_ft.size(); ++c)
    out << c << ',' << format_double(event.cumulative_in[c]) << ','
        << format_double(event.peak_in[c]) << ',' << format_double(event.duration_h)
        << ',' << format_double(event.depth_ft[c]) << "\n";
  write_file_atomic(path, out.str());
}

std::vector<double> load_synthetic_depths_csv(const std::string& path,
                                              std::size_t n_cells) {
  const CsvTable t = CsvTable::load(path);
  const int c_cell = t.column("cell_id");
  const int c_depth = t.column("depth_ft");
  std::vector<double> depths(n_cells, -1.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const long long cell = t.integer(r, c_cell);
    if (cell < 0 || cell >= static_cast<long long>(n_cells))
      fail(errc::bad_data, path + ": cell_id out of range");
    depths[static_cast<std::size_t>(cell)] = t.number(r, c_depth);
  }
  for (std::size_t c = 0; c < n_cells; ++c)
    if (depths[c] < 0.0)
      fail(errc::missing_cells, path + ": no row for cell " + std::to_string(c));
  return depths;
}

void save_batch_manifest(const std::string& path, std::span<const SyntheticEvent> events,
                         std::uint64_t base_seed,
                         std::span<const std::string> event_files) {
  nlohmann::ordered_json doc;
  doc["base_seed"] = base_seed;
  doc["n_events"] = events.size();
  doc["mesh_fingerprint"] = events.empty() ? "" : events.front().mesh_fingerprint;
  doc["events"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const SyntheticEvent& ev = events[i];
    nlohmann::ordered_json je = {{"event_id", ev.event_id},
                                 {"seed", ev.seed},
                                 {"duration_h", ev.duration_h},
                                 {"k", ev.k_used},
                                 {"widened_cells", ev.widened_cells},
                                 {"dry_fallback_cells", ev.dry_fallback_cells}};
    if (i < event_files.size()) je["file"] = event_files[i];
    doc["events"].push_back(std::move(je));
  }
  write_file_atomic(path, doc.dump(1));
}

}  // namespace floodgen

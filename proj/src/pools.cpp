#include "floodgen/pools.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "floodgen/common.hpp"
#include "floodgen/csv.hpp"
#include "floodgen/parallel.hpp"

namespace floodgen {

char lmh_letter(Lmh c) { return "LMH"[static_cast<int>(c)]; }

Lmh lmh_from_letter(char c) {
  switch (c) {
    case 'L': return Lmh::low;
    case 'M': return Lmh::medium;
    case 'H': return Lmh::high;
    default: fail(errc::bad_data, std::string("unknown class letter '") + c + "'");
  }
}

FeatureThreshold compute_feature_threshold(std::span<const double> values, double theta1,
                                           double theta2) {
  if (values.size() < 2)
    fail(errc::too_few_events, "thresholds need >= 2 values, got " +
                                   std::to_string(values.size()));
  if (theta1 <= 0.0 || theta2 <= 0.0) fail(errc::bad_config, "theta constants must be > 0");
  FeatureThreshold t;
  const double n = static_cast<double>(values.size());
  for (double v : values) t.mu += v;
  t.mu /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - t.mu) * (v - t.mu);
  t.sigma = std::sqrt(ss / (n - 1.0));
  t.b1 = std::max(0.0, t.mu - theta1 * t.sigma);
  t.b2 = t.mu + theta2 * t.sigma;
  if (t.b2 <= t.b1) {  // constant values collapse the medium band; widen it
    t.b2 = t.b1 + 1e-9;
    t.widened = true;
  }
  return t;
}

ThresholdSet compute_thresholds(std::span<const StormEvent> events, const Mesh& mesh,
                                std::int32_t cell_id, double theta1, double theta2) {
  if (events.size() < 2)
    fail(errc::too_few_events, "thresholds need >= 2 training events");
  if (cell_id < 0 || static_cast<std::size_t>(cell_id) >= mesh.cell_count())
    fail(errc::unknown_cell, "cell " + std::to_string(cell_id) + " not in mesh");
  const auto c = static_cast<std::size_t>(cell_id);
  std::array<std::vector<double>, 3> vals;
  for (auto& v : vals) v.reserve(events.size());
  for (const StormEvent& ev : events) {
    vals[0].push_back(ev.cumulative_in[c]);
    vals[1].push_back(ev.peak_in[c]);
    vals[2].push_back(ev.duration_h);
  }
  ThresholdSet set;
  set.theta1 = theta1;
  set.theta2 = theta2;
  for (std::size_t f = 0; f < 3; ++f)
    set.feature[f] = compute_feature_threshold(vals[f], theta1, theta2);
  return set;
}

Lmh classify(double value, const FeatureThreshold& t) {
  if (value < 0.0) fail(errc::negative_value, "cannot classify a negative value");
  if (value <= t.b1) return Lmh::low;
  if (value <= t.b2) return Lmh::medium;
  return Lmh::high;
}

std::size_t bucket_index(Lmh cum, Lmh peak, Lmh dur) {
  return static_cast<std::size_t>(cum) * 9 + static_cast<std::size_t>(peak) * 3 +
         static_cast<std::size_t>(dur);
}

std::size_t bucket_duration_class(std::size_t bucket) { return bucket % 3; }

void PoolSet::rebuild_union() {
  union_points.clear();
  union_dur_class.clear();
  for (const CellPool& cp : cells)
    for (std::size_t b = 0; b < kBucketCount; ++b)
      for (std::uint32_t idx : cp.buckets[b]) {
        union_points.push_back(idx);
        union_dur_class.push_back(static_cast<std::uint8_t>(bucket_duration_class(b)));
      }
}

PoolSet build_pools(const PointCloud& cloud, const Mesh& mesh,
                    std::span<const ThresholdSet> thresholds, int workers) {
  if (cloud.empty()) fail(errc::empty_dataset, "point cloud is empty");
  if (thresholds.size() != mesh.cell_count())
    fail(errc::length_mismatch, "need one threshold set per cell");

  const std::size_t n = cloud.size();
  // -1 marks a point outside the study area.
  std::vector<std::int32_t> point_cell(n);
  std::vector<std::uint8_t> point_bucket(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const LatLon p{cloud.cols[0][i], cloud.cols[1][i]};
    if (!mesh.contains(p)) {
      point_cell[i] = -1;
      return;
    }
    const std::int32_t c = mesh.assign_point(p);
    const ThresholdSet& t = thresholds[static_cast<std::size_t>(c)];
    const Lmh cum = classify(cloud.cols[2][i], t.feature[0]);
    const Lmh peak = classify(cloud.cols[3][i], t.feature[1]);
    const Lmh dur = classify(cloud.cols[4][i], t.feature[2]);
    point_cell[i] = c;
    point_bucket[i] = static_cast<std::uint8_t>(bucket_index(cum, peak, dur));
  });

  PoolSet pools;
  pools.mesh_fingerprint = mesh.fingerprint();
  pools.theta1 = thresholds.empty() ? 0.5 : thresholds[0].theta1;
  pools.theta2 = thresholds.empty() ? 0.5 : thresholds[0].theta2;
  pools.cells.resize(mesh.cell_count());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    pools.cells[c].cell_id = static_cast<std::int32_t>(c);
    pools.cells[c].thresholds = thresholds[c];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (point_cell[i] < 0) {
      ++pools.skipped_outside;
      continue;
    }
    pools.cells[static_cast<std::size_t>(point_cell[i])]
        .buckets[point_bucket[i]]
        .push_back(static_cast<std::uint32_t>(i));
  }
  pools.rebuild_union();
  return pools;
}

void save_pools(const std::string& csv_path, const std::string& manifest_path,
                const PoolSet& pools) {
  std::ostringstream out;
  out << "cell_id,cum_class,peak_class,dur_class,point_index\n";
  for (const CellPool& cp : pools.cells)
    for (std::size_t b = 0; b < kBucketCount; ++b) {
      const char cum = lmh_letter(static_cast<Lmh>(b / 9));
      const char peak = lmh_letter(static_cast<Lmh>((b / 3) % 3));
      const char dur = lmh_letter(static_cast<Lmh>(b % 3));
      for (std::uint32_t idx : cp.buckets[b])
        out << cp.cell_id << ',' << cum << ',' << peak << ',' << dur << ',' << idx << "\n";
    }
  write_file_atomic(csv_path, out.str());

  nlohmann::ordered_json doc;
  doc["mesh_fingerprint"] = pools.mesh_fingerprint;
  doc["theta1"] = pools.theta1;
  doc["theta2"] = pools.theta2;
  doc["skipped_outside"] = pools.skipped_outside;
  doc["cells"] = nlohmann::ordered_json::array();
  const char* names[3] = {"cumulative", "peak", "duration"};
  for (const CellPool& cp : pools.cells) {
    nlohmann::ordered_json jc;
    jc["cell_id"] = cp.cell_id;
    for (std::size_t f = 0; f < 3; ++f) {
      const FeatureThreshold& t = cp.thresholds.feature[f];
      jc[names[f]] = {{"mu", t.mu},
                      {"sigma", t.sigma},
                      {"b1", t.b1},
                      {"b2", t.b2},
                      {"widened", t.widened}};
    }
    doc["cells"].push_back(std::move(jc));
  }
  write_file_atomic(manifest_path, doc.dump(1));
}

PoolSet load_pools(const std::string& csv_path, const std::string& manifest_path,
                   const Mesh& mesh) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_store, "invalid pool manifest " + manifest_path + ": " + e.what());
  }
  PoolSet pools;
  try {
    pools.mesh_fingerprint = doc.at("mesh_fingerprint").get<std::string>();
    pools.theta1 = doc.at("theta1").get<double>();
    pools.theta2 = doc.at("theta2").get<double>();
    pools.skipped_outside = doc.at("skipped_outside").get<std::uint64_t>();
    if (pools.mesh_fingerprint != mesh.fingerprint())
      fail(errc::mesh_fingerprint_mismatch,
           "pool manifest was built for a different mesh");
    pools.cells.resize(mesh.cell_count());
    const char* names[3] = {"cumulative", "peak", "duration"};
    for (const auto& jc : doc.at("cells")) {
      const auto cid = jc.at("cell_id").get<std::int32_t>();
      if (cid < 0 || static_cast<std::size_t>(cid) >= mesh.cell_count())
        fail(errc::corrupt_store, "pool manifest names cell " + std::to_string(cid));
      CellPool& cp = pools.cells[static_cast<std::size_t>(cid)];
      cp.cell_id = cid;
      cp.thresholds.theta1 = pools.theta1;
      cp.thresholds.theta2 = pools.theta2;
      for (std::size_t f = 0; f < 3; ++f) {
        const auto& jf = jc.at(names[f]);
        FeatureThreshold& t = cp.thresholds.feature[f];
        t.mu = jf.at("mu").get<double>();
        t.sigma = jf.at("sigma").get<double>();
        t.b1 = jf.at("b1").get<double>();
        t.b2 = jf.at("b2").get<double>();
        t.widened = jf.at("widened").get<bool>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_store, "invalid pool manifest " + manifest_path + ": " + e.what());
  }

  const CsvTable t = CsvTable::load(csv_path);
  const int c_cell = t.column("cell_id");
  const int c_cum = t.column("cum_class");
  const int c_peak = t.column("peak_class");
  const int c_dur = t.column("dur_class");
  const int c_idx = t.column("point_index");
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const long long cid = t.integer(r, c_cell);
    if (cid < 0 || static_cast<std::size_t>(cid) >= mesh.cell_count())
      fail(errc::corrupt_store, csv_path + ": pool row names unknown cell");
    const std::size_t b = bucket_index(lmh_from_letter(t.cell(r, c_cum)[0]),
                                       lmh_from_letter(t.cell(r, c_peak)[0]),
                                       lmh_from_letter(t.cell(r, c_dur)[0]));
    pools.cells[static_cast<std::size_t>(cid)].buckets[b].push_back(
        static_cast<std::uint32_t>(t.integer(r, c_idx)));
  }
  pools.rebuild_union();
  return pools;
}

}  // namespace floodgen

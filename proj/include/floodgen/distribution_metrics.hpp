#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floodgen/mesh.hpp"

namespace floodgen {

// Linear resampling of a value sequence onto m points with both endpoints
// preserved; m = 1 keeps the first value.
std::vector<double> resample_interp(std::span<const double> ds, std::size_t m);

double cosine_sim(std::span<const double> a, std::span<const double> b);
double pearson(std::span<const double> a, std::span<const double> b);
double kl_divergence(std::span<const double> dt, std::span<const double> ds,
                     double eps = 1e-10);

struct CellComparison {
  std::int32_t cell_id = 0;
  double rmse = 0.0;
  double cosine = 0.0;
  std::optional<double> pearson;  // empty when every repeat hit a constant vector
  double kl = 0.0;
};

struct CompareOptions {
  int repeats = 50;
  std::uint64_t seed = 0;
  bool sort_vectors = true;  // compare as empirical quantile vectors
};

CellComparison compare_cell(std::span<const double> train_depths,
                            std::span<const double> synth_depths,
                            const CompareOptions& opt = {});

struct SummaryRow {
  std::string partition;  // overall / channel / non_channel
  std::string metric;     // rmse / cosine / pearson / kl
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

// Quantile at fraction p of sorted values, linear interpolation between
// order statistics.
double quantile_sorted(std::span<const double> sorted_values, double p);

std::vector<SummaryRow> aggregate_report(std::span<const CellComparison> comparisons,
                                         const Mesh& mesh);

void save_report_csv(const std::string& path, std::span<const SummaryRow> rows);

}  // namespace floodgen

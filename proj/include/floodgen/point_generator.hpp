#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "floodgen/mesh.hpp"

namespace floodgen {

inline constexpr std::size_t kPointFeatureCount = 5;

struct PointRecord {
  double lat = 0.0;
  double lon = 0.0;
  double cumulative_in = 0.0;
  double peak_in = 0.0;
  double duration_h = 0.0;
};

// Column-wise storage; columns follow the (lat, lon, cumulative, peak,
// duration) record layout.
struct PointCloud {
  std::array<std::vector<double>, kPointFeatureCount> cols;

  std::size_t size() const { return cols[0].size(); }
  bool empty() const { return cols[0].empty(); }
  void reserve(std::size_t n) {
    for (auto& c : cols) c.reserve(n);
  }
  void push(const PointRecord& p) {
    cols[0].push_back(p.lat);
    cols[1].push_back(p.lon);
    cols[2].push_back(p.cumulative_in);
    cols[3].push_back(p.peak_in);
    cols[4].push_back(p.duration_h);
  }
  PointRecord at(std::size_t i) const {
    return {cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i]};
  }
  std::span<const double> lat() const { return cols[0]; }
  std::span<const double> lon() const { return cols[1]; }
  std::span<const double> cumulative() const { return cols[2]; }
  std::span<const double> peak() const { return cols[3]; }
  std::span<const double> duration() const { return cols[4]; }
};

extern const std::array<std::string, kPointFeatureCount> kPointFeatureNames;

struct GeneratorConfig {
  std::string backend = "copula";
  bool allow_dry = false;        // accept (cumulative, peak) == (0, 0) records
  double marginal_jitter = 0.0;  // Gaussian noise added to marginals at fit time
  std::uint64_t jitter_seed = 0;
};

using Matrix5 = std::array<std::array<double, kPointFeatureCount>, kPointFeatureCount>;

struct GeneratorModel {
  std::string backend = "copula";
  bool allow_dry = false;
  std::array<std::vector<double>, kPointFeatureCount> marginals;  // each sorted ascending
  Matrix5 latent{};   // repaired correlation of normal scores
  Matrix5 ch_lower{};  // cached Cholesky-type factor of `latent`
};

// Normal scores of one feature column: rank / (n + 1) through the inverse
// normal CDF, with average ranks on ties.
std::vector<double> normal_scores(std::span<const double> values);

// Eigenvalue clipping at zero followed by rescaling to a unit diagonal.
Matrix5 nearest_psd_correlation(Matrix5 m);

// Lower-triangular factor L with L Lt = m, tolerant of semidefinite input.
Matrix5 semidefinite_cholesky(const Matrix5& m);

// Quantile of sorted values at u in [0, 1]; linear interpolation between
// order statistics, clamped to observed min/max.
double interp_quantile(std::span<const double> sorted_values, double u);

GeneratorModel fit_generator(const PointCloud& train, const GeneratorConfig& cfg = {});

PointCloud sample_constrained(const GeneratorModel& model, std::size_t n, const Mesh& mesh,
                              std::uint64_t seed, double max_attempt_factor = 100.0);

double ks_statistic(std::span<const double> a, std::span<const double> b);

struct QualityReport {
  std::vector<std::string> features;
  std::vector<double> ks;
  double score = 0.0;
};

QualityReport quality_score(const PointCloud& train, const PointCloud& synth);

struct SelectionResult {
  std::size_t best_index = 0;
  GeneratorModel best;
  std::vector<QualityReport> reports;
};

SelectionResult select_generator(const PointCloud& train, const Mesh& mesh,
                                 std::span<const GeneratorConfig> candidates,
                                 std::size_t sample_size, std::uint64_t seed);

PointCloud load_points_csv(const std::string& path);
void save_points_csv(const std::string& path, const PointCloud& cloud);

void save_generator_json(const std::string& path, const GeneratorModel& model);
GeneratorModel load_generator_json(const std::string& path);

}  // namespace floodgen

#include "floodgen/point_generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "floodgen/common.hpp"
#include "floodgen/csv.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

const std::array<std::string, kPointFeatureCount> kPointFeatureNames = {
    "lat", "lon", "cumulative_in", "peak_in", "duration_h"};

std::vector<double> normal_scores(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> scores(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    const double s = inv_norm_cdf(avg_rank / (static_cast<double>(n) + 1.0));
    for (std::size_t k = i; k <= j; ++k) scores[order[k]] = s;
    i = j + 1;
  }
  return scores;
}

namespace {

// Cyclic Jacobi eigendecomposition for symmetric 5x5 matrices.
void jacobi_eigen(Matrix5 a, std::array<double, kPointFeatureCount>& eigval, Matrix5& eigvec) {
  constexpr std::size_t N = kPointFeatureCount;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) eigvec[i][j] = i == j ? 1.0 : 0.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        if (std::fabs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double vkp = eigvec[k][p], vkq = eigvec[k][q];
          eigvec[k][p] = c * vkp - s * vkq;
          eigvec[k][q] = s * vkp + c * vkq;
        }
      }
  }
  for (std::size_t i = 0; i < N; ++i) eigval[i] = a[i][i];
}

}  // namespace

Matrix5 nearest_psd_correlation(Matrix5 m) {
  constexpr std::size_t N = kPointFeatureCount;
  std::array<double, N> ev;
  Matrix5 v;
  jacobi_eigen(m, ev, v);
  for (double& e : ev) e = std::max(e, 0.0);
  Matrix5 out{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < N; ++k) s += v[i][k] * ev[k] * v[j][k];
      out[i][j] = s;
    }
  std::array<double, N> d;
  for (std::size_t i = 0; i < N; ++i) d[i] = out[i][i] > 0.0 ? std::sqrt(out[i][i]) : 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (d[i] == 0.0 || d[j] == 0.0)
        out[i][j] = i == j ? 1.0 : 0.0;
      else
        out[i][j] = out[i][j] / (d[i] * d[j]);
    }
  for (std::size_t i = 0; i < N; ++i) {
    out[i][i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double avg = 0.5 * (out[i][j] + out[j][i]);
      out[i][j] = out[j][i] = std::clamp(avg, -1.0, 1.0);
    }
  }
  return out;
}

Matrix5 semidefinite_cholesky(const Matrix5& m) {
  constexpr std::size_t N = kPointFeatureCount;
  Matrix5 l{};
  for (std::size_t j = 0; j < N; ++j) {
    double d = m[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d <= 1e-12) {
      l[j][j] = 0.0;
      continue;
    }
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < N; ++i) {
      double s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

double interp_quantile(std::span<const double> sorted_values, double u) {
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted_values[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

GeneratorModel fit_generator(const PointCloud& train, const GeneratorConfig& cfg) {
  constexpr std::size_t N = kPointFeatureCount;
  const std::size_t n = train.size();
  if (n < 10)
    fail(errc::too_few_records, "generator needs >= 10 records, got " + std::to_string(n));
  if (cfg.backend != "copula")
    fail(errc::bad_config, "unknown generator backend '" + cfg.backend + "'");

  GeneratorModel model;
  model.backend = cfg.backend;
  model.allow_dry = cfg.allow_dry;

  std::array<std::vector<double>, N> columns = train.cols;
  if (cfg.marginal_jitter > 0.0) {
    Rng rng(cfg.jitter_seed);
    for (auto& col : columns)
      for (double& v : col) v += cfg.marginal_jitter * rng.next_normal();
  }

  std::array<std::vector<double>, N> scores;
  std::array<bool, N> degenerate{};
  for (std::size_t f = 0; f < N; ++f) {
    degenerate[f] =
        *std::min_element(columns[f].begin(), columns[f].end()) ==
        *std::max_element(columns[f].begin(), columns[f].end());
    scores[f] = normal_scores(columns[f]);
    model.marginals[f] = columns[f];
    std::sort(model.marginals[f].begin(), model.marginals[f].end());
  }

  Matrix5 corr{};
  std::array<double, N> mean{}, var{};
  for (std::size_t f = 0; f < N; ++f) {
    for (double s : scores[f]) mean[f] += s;
    mean[f] /= static_cast<double>(n);
    for (double s : scores[f]) var[f] += (s - mean[f]) * (s - mean[f]);
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) {
        corr[i][j] = 1.0;
        continue;
      }
      if (degenerate[i] || degenerate[j] || var[i] == 0.0 || var[j] == 0.0) {
        corr[i][j] = 0.0;
        continue;
      }
      double cov = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        cov += (scores[i][k] - mean[i]) * (scores[j][k] - mean[j]);
      corr[i][j] = std::clamp(cov / std::sqrt(var[i] * var[j]), -1.0, 1.0);
    }

  model.latent = nearest_psd_correlation(corr);
  for (std::size_t i = 0; i < N; ++i)
    if (degenerate[i]) {
      for (std::size_t j = 0; j < N; ++j)
        model.latent[i][j] = model.latent[j][i] = i == j ? 1.0 : 0.0;
    }
  model.ch_lower = semidefinite_cholesky(model.latent);
  return model;
}

namespace {

bool record_ok(const PointRecord& p, const Mesh& mesh, bool allow_dry) {
  if (p.duration_h < 1.0) return false;
  if (!mesh.contains({p.lat, p.lon})) return false;
  if (allow_dry && p.cumulative_in == 0.0 && p.peak_in == 0.0) return true;
  if (!(p.cumulative_in > p.peak_in)) return false;
  if (!(p.peak_in > p.cumulative_in / p.duration_h)) return false;
  return true;
}

PointRecord draw_record(const GeneratorModel& model, std::uint64_t seed,
                        std::uint64_t draw_index) {
  constexpr std::size_t N = kPointFeatureCount;
  Rng rng(seed, draw_index);
  std::array<double, N> z;
  for (double& v : z) v = rng.next_normal();
  std::array<double, N> values;
  for (std::size_t i = 0; i < N; ++i) {
    double latent = 0.0;
    for (std::size_t j = 0; j <= i; ++j) latent += model.ch_lower[i][j] * z[j];
    values[i] = interp_quantile(model.marginals[i], norm_cdf(latent));
  }
  return {values[0], values[1], values[2], values[3], values[4]};
}

}  // namespace

PointCloud sample_constrained(const GeneratorModel& model, std::size_t n, const Mesh& mesh,
                              std::uint64_t seed, double max_attempt_factor) {
  PointCloud out;
  out.reserve(n);
  if (n == 0) return out;
  const auto budget =
      static_cast<std::uint64_t>(max_attempt_factor * static_cast<double>(n));
  std::size_t accepted = 0;
  for (std::uint64_t draw = 0; draw < budget && accepted < n; ++draw) {
    const PointRecord p = draw_record(model, seed, draw);
    if (record_ok(p, mesh, model.allow_dry)) {
      out.push(p);
      ++accepted;
    }
  }
  if (accepted < n)
    fail(errc::acceptance_rate_too_low,
         "accepted " + std::to_string(accepted) + " of " + std::to_string(n) +
             " requested records within " + std::to_string(budget) + " draws");
  return out;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(errc::empty_sample, "KS statistic of an empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() || j < sb.size()) {
    const double x = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

QualityReport quality_score(const PointCloud& train, const PointCloud& synth) {
  if (train.empty() || synth.empty())
    fail(errc::empty_dataset, "quality score needs non-empty datasets");
  QualityReport rep;
  for (std::size_t f = 2; f < kPointFeatureCount; ++f) {
    rep.features.push_back(kPointFeatureNames[f]);
    rep.ks.push_back(ks_statistic(train.cols[f], synth.cols[f]));
  }
  double s = 0.0;
  for (double k : rep.ks) s += 1.0 - k;
  rep.score = s / static_cast<double>(rep.ks.size());
  return rep;
}

SelectionResult select_generator(const PointCloud& train, const Mesh& mesh,
                                 std::span<const GeneratorConfig> candidates,
                                 std::size_t sample_size, std::uint64_t seed) {
  if (candidates.empty()) fail(errc::bad_config, "no generator candidates");
  SelectionResult res;
  double best = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    GeneratorModel model = fit_generator(train, candidates[i]);
    const PointCloud sample = sample_constrained(model, sample_size, mesh, seed);
    QualityReport rep = quality_score(train, sample);
    if (rep.score > best) {
      best = rep.score;
      res.best_index = i;
      res.best = std::move(model);
    }
    res.reports.push_back(std::move(rep));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Persistence

PointCloud load_points_csv(const std::string& path) {
  const CsvTable t = CsvTable::load(path);
  std::array<int, kPointFeatureCount> col;
  for (std::size_t f = 0; f < kPointFeatureCount; ++f)
    col[f] = t.column(kPointFeatureNames[f]);
  PointCloud cloud;
  cloud.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r)
    cloud.push({t.number(r, col[0]), t.number(r, col[1]), t.number(r, col[2]),
                t.number(r, col[3]), t.number(r, col[4])});
  return cloud;
}

void save_points_csv(const std::string& path, const PointCloud& cloud) {
  std::ostringstream out;
  out << "lat,lon,cumulative_in,peak_in,duration_h\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const PointRecord p = cloud.at(i);
    out << format_double(p.lat) << ',' << format_double(p.lon) << ','
        << format_double(p.cumulative_in) << ',' << format_double(p.peak_in) << ','
        << format_double(p.duration_h) << "\n";
  }
  write_file_atomic(path, out.str());
}

void save_generator_json(const std::string& path, const GeneratorModel& model) {
  nlohmann::ordered_json doc;
  doc["backend"] = model.backend;
  doc["allow_dry"] = model.allow_dry;
  for (std::size_t f = 0; f < kPointFeatureCount; ++f)
    doc["marginals"][kPointFeatureNames[f]] = model.marginals[f];
  doc["latent"] = model.latent;
  write_file_atomic(path, doc.dump(1));
}

GeneratorModel load_generator_json(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_store, "invalid generator file " + path + ": " + e.what());
  }
  GeneratorModel model;
  try {
    model.backend = doc.at("backend").get<std::string>();
    model.allow_dry = doc.at("allow_dry").get<bool>();
    for (std::size_t f = 0; f < kPointFeatureCount; ++f) {
      model.marginals[f] =
          doc.at("marginals").at(kPointFeatureNames[f]).get<std::vector<double>>();
      if (model.marginals[f].empty() ||
          !std::is_sorted(model.marginals[f].begin(), model.marginals[f].end()))
        fail(errc::corrupt_store, path + ": marginals must be sorted and non-empty");
    }
    model.latent = doc.at("latent").get<Matrix5>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_store, "invalid generator file " + path + ": " + e.what());
  }
  model.ch_lower = semidefinite_cholesky(model.latent);
  return model;
}

}  // namespace floodgen

#include "floodgen/distribution_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "floodgen/common.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

std::vector<double> resample_interp(std::span<const double> ds, std::size_t m) {
  const std::size_t n = ds.size();
  if (n == 0 || m == 0) fail(errc::empty_input, "resampling needs non-empty input and m >= 1");
  std::vector<double> out(m);
  if (m == 1) {
    out[0] = ds[0];
    return out;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double pos = static_cast<double>(j) / static_cast<double>(m - 1) *
                       static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) {
      out[j] = ds[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(lo);
    out[j] = ds[lo] + frac * (ds[lo + 1] - ds[lo]);
  }
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(errc::length_mismatch, "cosine needs equal lengths");
  if (a.empty()) fail(errc::empty_input, "cosine of empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(errc::zero_vector, "cosine of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(errc::length_mismatch, "correlation needs equal lengths");
  if (a.size() < 2) fail(errc::empty_input, "correlation needs >= 2 values");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) fail(errc::constant_vector, "correlation of a constant vector");
  return cov / (std::sqrt(va) * std::sqrt(vb));
}

double kl_divergence(std::span<const double> dt, std::span<const double> ds, double eps) {
  if (dt.size() != ds.size()) fail(errc::length_mismatch, "divergence needs equal lengths");
  if (dt.empty()) fail(errc::empty_input, "divergence of empty vectors");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (dt[i] < 0.0 || ds[i] < 0.0) fail(errc::negative_value, "divergence needs values >= 0");
    sp += dt[i] + eps;
    sq += ds[i] + eps;
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const double p = (dt[i] + eps) / sp;
    const double q = (ds[i] + eps) / sq;
    if (p > 0.0) kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

CellComparison compare_cell(std::span<const double> train_depths,
                            std::span<const double> synth_depths,
                            const CompareOptions& opt) {
  if (train_depths.empty() || synth_depths.empty())
    fail(errc::empty_input, "depth distributions must be non-empty");
  if (synth_depths.size() < train_depths.size())
    fail(errc::synth_smaller_than_train,
         "synthetic sample (" + std::to_string(synth_depths.size()) +
             ") is smaller than training sample (" + std::to_string(train_depths.size()) +
             ")");
  if (opt.repeats < 1) fail(errc::bad_config, "repeats must be >= 1");

  const std::size_t n = train_depths.size();
  std::vector<double> dt(train_depths.begin(), train_depths.end());
  if (opt.sort_vectors) std::sort(dt.begin(), dt.end());

  CellComparison cmp;
  double rmse_sum = 0.0, cos_sum = 0.0, kl_sum = 0.0, pear_sum = 0.0;
  int pear_defined = 0;
  std::vector<std::size_t> idx(synth_depths.size());
  std::vector<double> drawn(n);
  for (int r = 0; r < opt.repeats; ++r) {
    Rng rng(opt.seed, static_cast<std::uint64_t>(r));
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < n; ++i)
      std::swap(idx[i], idx[i + rng.next_below(idx.size() - i)]);
    for (std::size_t i = 0; i < n; ++i) drawn[i] = synth_depths[idx[i]];
    if (opt.sort_vectors) std::sort(drawn.begin(), drawn.end());
    std::vector<double> aligned =
        drawn.size() == dt.size() ? drawn : resample_interp(drawn, dt.size());

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sse += (aligned[i] - dt[i]) * (aligned[i] - dt[i]);
    rmse_sum += std::sqrt(sse / static_cast<double>(n));
    cos_sum += cosine_sim(dt, aligned);
    kl_sum += kl_divergence(dt, aligned);
    try {
      pear_sum += pearson(dt, aligned);
      ++pear_defined;
    } catch (const Error& e) {
      if (e.code() != errc::constant_vector) throw;
    }
  }
  const double reps = static_cast<double>(opt.repeats);
  cmp.rmse = rmse_sum / reps;
  cmp.cosine = cos_sum / reps;
  cmp.kl = kl_sum / reps;
  if (pear_defined > 0) cmp.pearson = pear_sum / static_cast<double>(pear_defined);
  return cmp;
}

double quantile_sorted(std::span<const double> sorted_values, double p) {
  const std::size_t n = sorted_values.size();
  if (n == 0) fail(errc::empty_input, "quantile of an empty set");
  if (n == 1) return sorted_values[0];
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted_values[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

std::vector<SummaryRow> aggregate_report(std::span<const CellComparison> comparisons,
                                         const Mesh& mesh) {
  if (comparisons.empty()) fail(errc::empty_dataset, "no cell comparisons to aggregate");
  const char* partitions[3] = {"overall", "channel", "non_channel"};
  const char* metrics[4] = {"rmse", "cosine", "pearson", "kl"};

  std::vector<SummaryRow> rows;
  for (int part = 0; part < 3; ++part) {
    std::size_t members = 0;
    for (const CellComparison& c : comparisons) {
      const bool ch = mesh.cell(c.cell_id).channel;
      if (part == 1 && !ch) continue;
      if (part == 2 && ch) continue;
      ++members;
    }
    if (members == 0)
      fail(errc::empty_partition,
           std::string("partition '") + partitions[part] + "' has no cells");
    for (int metric = 0; metric < 4; ++metric) {
      std::vector<double> vals;
      vals.reserve(members);
      for (const CellComparison& c : comparisons) {
        const bool ch = mesh.cell(c.cell_id).channel;
        if (part == 1 && !ch) continue;
        if (part == 2 && ch) continue;
        switch (metric) {
          case 0: vals.push_back(c.rmse); break;
          case 1: vals.push_back(c.cosine); break;
          case 2:
            if (c.pearson) vals.push_back(*c.pearson);
            break;
          case 3: vals.push_back(c.kl); break;
        }
      }
      SummaryRow row;
      row.partition = partitions[part];
      row.metric = metrics[metric];
      row.count = vals.size();
      if (!vals.empty()) {
        std::sort(vals.begin(), vals.end());
        const double n = static_cast<double>(vals.size());
        row.mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : vals) ss += (v - row.mean) * (v - row.mean);
        row.stddev = vals.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        row.min = vals.front();
        row.q25 = quantile_sorted(vals, 0.25);
        row.q50 = quantile_sorted(vals, 0.50);
        row.q75 = quantile_sorted(vals, 0.75);
        row.max = vals.back();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void save_report_csv(const std::string& path, std::span<const SummaryRow> rows) {
  std::ostringstream out;
  out << "partition,metric,count,mean,std,min,q25,q50,q75,max\n";
  for (const SummaryRow& r : rows)
    out << r.partition << ',' << r.metric << ',' << r.count << ',' << format_double(r.mean)
        << ',' << format_double(r.stddev) << ',' << format_double(r.min) << ','
        << format_double(r.q25) << ',' << format_double(r.q50) << ','
        << format_double(r.q75) << ',' << format_double(r.max) << "\n";
  write_file_atomic(path, out.str());
}

}  // namespace floodgen

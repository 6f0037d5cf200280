#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "floodgen/common.hpp"
#include "floodgen/csv.hpp"
#include "floodgen/distribution_metrics.hpp"
#include "helpers.hpp"

using namespace floodgen;
using testing::code;
using testing::thrown_code;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

// Comparisons with rmse equal to the cell id and friendly fixed metrics.
std::vector<CellComparison> ramp_comparisons(std::size_t n_cells) {
  std::vector<CellComparison> out;
  for (std::size_t c = 0; c < n_cells; ++c) {
    CellComparison cmp;
    cmp.cell_id = static_cast<std::int32_t>(c);
    cmp.rmse = static_cast<double>(c);
    cmp.cosine = 0.9;
    cmp.pearson = 0.8;
    cmp.kl = 0.05;
    out.push_back(cmp);
  }
  return out;
}

}  // namespace

TEST_CASE("resample_interp stretches sorted samples linearly") {
  CHECK(resample_interp(std::vector<double>{0.0, 10.0}, 3) ==
        std::vector<double>{0.0, 5.0, 10.0});
  CHECK(resample_interp(std::vector<double>{4.0, 9.0}, 1) == std::vector<double>{4.0});

  // m == n is the identity when positions land exactly on order statistics
  const std::vector<double> five{1.0, 2.0, 4.0, 8.0, 16.0};
  CHECK(resample_interp(five, 5) == five);

  // endpoints always survive, and monotone input stays monotone
  for (std::size_t m : {2u, 3u, 7u, 40u}) {
    const auto r = resample_interp(five, m);
    CHECK(r.front() == five.front());
    CHECK(r.back() == five.back());
    CHECK(std::is_sorted(r.begin(), r.end()));
  }

  CHECK(thrown_code([&] { (void)resample_interp(std::vector<double>{}, 3); }) ==
        code(errc::empty_input));
  CHECK(thrown_code([&] { (void)resample_interp(five, 0); }) == code(errc::empty_input));
}

TEST_CASE("cosine similarity handles alignment and degenerate vectors") {
  CHECK(cosine_sim(std::vector<double>{3.0, 4.0}, std::vector<double>{6.0, 8.0}) == 1.0);
  CHECK(cosine_sim(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) == 0.0);
  CHECK(cosine_sim(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 1.0}) ==
        1.0 / std::sqrt(2.0));
  CHECK(cosine_sim(std::vector<double>{3.0, 4.0}, std::vector<double>{4.0, 3.0}) ==
        doctest::Approx(0.96).epsilon(1e-15));

  CHECK(thrown_code([&] {
          (void)cosine_sim(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 2.0});
        }) == code(errc::zero_vector));
  CHECK(thrown_code([&] {
          (void)cosine_sim(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0});
        }) == code(errc::length_mismatch));
  CHECK(thrown_code([&] {
          (void)cosine_sim(std::vector<double>{}, std::vector<double>{});
        }) == code(errc::empty_input));
}

TEST_CASE("pearson correlation matches hand-computed values") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(pearson(x, std::vector<double>{2.0, 4.0, 6.0}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, std::vector<double>{6.0, 4.0, 2.0}) ==
        doctest::Approx(-1.0).epsilon(1e-15));
  // cov 5, variances 2 and 38/3
  CHECK(pearson(x, std::vector<double>{2.0, 4.0, 7.0}) ==
        doctest::Approx(5.0 / std::sqrt(76.0 / 3.0)).epsilon(1e-15));

  CHECK(thrown_code([&] { (void)pearson(x, std::vector<double>{5.0, 5.0, 5.0}); }) ==
        code(errc::constant_vector));
  CHECK(thrown_code([&] { (void)pearson(std::vector<double>{1.0}, std::vector<double>{2.0}); }) ==
        code(errc::empty_input));
  CHECK(thrown_code([&] { (void)pearson(x, std::vector<double>{1.0, 2.0}); }) ==
        code(errc::length_mismatch));
}

TEST_CASE("kl divergence is zero at identity and positive otherwise") {
  const std::vector<double> p{0.25, 0.25, 0.5};
  CHECK(kl_divergence(p, p) == 0.0);
  // a near-point mass against a fair coin costs ln 2
  CHECK(kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(kl_divergence(p, std::vector<double>{0.5, 0.25, 0.25}) > 0.0);

  CHECK(thrown_code([&] {
          (void)kl_divergence(std::vector<double>{-0.1, 1.1}, std::vector<double>{0.5, 0.5});
        }) == code(errc::negative_value));
  CHECK(thrown_code([&] { (void)kl_divergence(p, std::vector<double>{1.0}); }) ==
        code(errc::length_mismatch));
  CHECK(thrown_code([&] {
          (void)kl_divergence(std::vector<double>{}, std::vector<double>{});
        }) == code(errc::empty_input));
}

TEST_CASE("comparing a distribution against itself is perfect") {
  const std::vector<double> depths{0.1, 0.4, 0.2, 0.9, 0.6};
  const CellComparison cmp = compare_cell(depths, depths, {});
  CHECK(cmp.rmse == 0.0);
  CHECK(cmp.kl == 0.0);
  CHECK(cmp.cosine == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(cmp.pearson.has_value());
  CHECK(*cmp.pearson == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("a constant shift shows up as exactly that rmse") {
  const std::vector<double> train{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> synth{2.0, 3.0, 4.0, 5.0};
  const CellComparison cmp = compare_cell(train, synth, {});
  CHECK(cmp.rmse == 1.0);
  CHECK(cmp.kl > 0.0);
}

TEST_CASE("comparison draws are seeded and repeatable") {
  const std::vector<double> train{0.2, 0.5, 0.8, 1.1, 1.4, 1.7};
  std::vector<double> synth;
  Rng rng(3, 0);
  for (int i = 0; i < 200; ++i) synth.push_back(2.0 * rng.next_double());

  CompareOptions opt;
  opt.seed = 17;
  const CellComparison a = compare_cell(train, synth, opt);
  const CellComparison b = compare_cell(train, synth, opt);
  CHECK(a.rmse == b.rmse);
  CHECK(a.cosine == b.cosine);
  CHECK(a.kl == b.kl);
  CHECK(a.pearson == b.pearson);

  opt.seed = 18;
  CHECK(compare_cell(train, synth, opt).rmse != a.rmse);

  // resampling path: train and drawn sizes differ, metrics stay finite
  const std::vector<double> small{0.3, 0.6, 0.9};
  const CellComparison r = compare_cell(small, synth, opt);
  CHECK(std::isfinite(r.rmse));
  CHECK(std::isfinite(r.cosine));
  CHECK(std::isfinite(r.kl));
}

TEST_CASE("sorting can be disabled for paired comparisons") {
  const std::vector<double> train{1.0, 2.0, 3.0, 4.0, 5.0};
  CompareOptions opt;
  CHECK(compare_cell(train, train, opt).rmse == 0.0);
  opt.sort_vectors = false;
  CHECK(compare_cell(train, train, opt).rmse > 0.0);  // random pairing misaligns
}

TEST_CASE("constant training depths leave pearson undefined") {
  const std::vector<double> train{2.0, 2.0, 2.0};
  const std::vector<double> synth{2.0, 2.0, 2.0, 2.0};
  const CellComparison cmp = compare_cell(train, synth, {});
  CHECK(cmp.rmse == 0.0);
  CHECK(cmp.kl == 0.0);
  CHECK(!cmp.pearson.has_value());
}

TEST_CASE("comparison input validation") {
  const std::vector<double> train{1.0, 2.0, 3.0};
  CHECK(thrown_code([&] { (void)compare_cell(train, std::vector<double>{1.0, 2.0}, {}); }) ==
        code(errc::synth_smaller_than_train));
  CHECK(thrown_code([&] { (void)compare_cell(std::vector<double>{}, train, {}); }) ==
        code(errc::empty_input));
  CompareOptions opt;
  opt.repeats = 0;
  CHECK(thrown_code([&] { (void)compare_cell(train, train, opt); }) == code(errc::bad_config));
}

TEST_CASE("quantiles interpolate sorted values") {
  CHECK(quantile_sorted(std::vector<double>{1.0, 3.0}, 0.5) == 2.0);
  const std::vector<double> v{0.0, 10.0, 20.0, 30.0};
  CHECK(quantile_sorted(v, 0.25) == 7.5);
  CHECK(quantile_sorted(v, 0.0) == 0.0);
  CHECK(quantile_sorted(v, 1.0) == 30.0);
  CHECK(quantile_sorted(v, -1.0) == 0.0);   // clamped
  CHECK(quantile_sorted(v, 2.0) == 30.0);
  CHECK(quantile_sorted(std::vector<double>{5.0}, 0.7) == 5.0);
  CHECK(quantile_sorted(std::vector<double>{1.0, 2.0, 3.0, 4.0, 100.0}, 0.5) == 3.0);
  CHECK(thrown_code([&] { (void)quantile_sorted(std::vector<double>{}, 0.5); }) ==
        code(errc::empty_input));
}

TEST_CASE("the aggregate report is partition-major with exact statistics") {
  const Mesh mesh = testing::grid_mesh(3, 2, 1, /*channel_row=*/0);  // cells 0..2 channel
  const auto comparisons = ramp_comparisons(6);
  const auto rows = aggregate_report(comparisons, mesh);
  REQUIRE(rows.size() == 12);

  const char* partitions[3] = {"overall", "channel", "non_channel"};
  const char* metrics[4] = {"rmse", "cosine", "pearson", "kl"};
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(rows[i].partition == partitions[i / 4]);
    CHECK(rows[i].metric == metrics[i % 4]);
  }

  const SummaryRow& overall = rows[0];  // rmse over {0,1,2,3,4,5}
  CHECK(overall.count == 6);
  CHECK(overall.mean == 2.5);
  CHECK(overall.stddev == std::sqrt(3.5));
  CHECK(overall.min == 0.0);
  CHECK(overall.q25 == 1.25);
  CHECK(overall.q50 == 2.5);
  CHECK(overall.q75 == 3.75);
  CHECK(overall.max == 5.0);

  const SummaryRow& channel = rows[4];  // rmse over {0,1,2}
  CHECK(channel.count == 3);
  CHECK(channel.mean == 1.0);
  CHECK(channel.stddev == 1.0);
  CHECK(channel.q50 == 1.0);

  const SummaryRow& non_channel = rows[8];  // rmse over {3,4,5}
  CHECK(non_channel.count == 3);
  CHECK(non_channel.mean == 4.0);
}

TEST_CASE("aggregation counts only defined pearson values") {
  const Mesh mesh = testing::grid_mesh(2, 2, 1, /*channel_row=*/0);
  auto comparisons = ramp_comparisons(4);
  comparisons[1].pearson.reset();  // channel cell loses its correlation
  const auto rows = aggregate_report(comparisons, mesh);
  CHECK(rows[2].count == 3);   // overall pearson
  CHECK(rows[0].count == 4);   // overall rmse unaffected
  CHECK(rows[6].count == 1);   // channel pearson: only cell 0 remains
  CHECK(rows[10].count == 2);  // non-channel pearson intact

  // one-member partitions report zero spread
  CHECK(rows[6].stddev == 0.0);
}

TEST_CASE("aggregation requires every partition to be populated") {
  const Mesh plain = testing::grid_mesh(2, 2);  // no channel cells
  CHECK(thrown_code([&] { (void)aggregate_report(ramp_comparisons(4), plain); }) ==
        code(errc::empty_partition));
  const Mesh mixed = testing::grid_mesh(2, 2, 1, 0);
  CHECK(thrown_code([&] { (void)aggregate_report(std::vector<CellComparison>{}, mixed); }) ==
        code(errc::empty_dataset));
}

TEST_CASE("summary rows render to CSV and parse back") {
  const Mesh mesh = testing::grid_mesh(3, 2, 1, 0);
  const auto rows = aggregate_report(ramp_comparisons(6), mesh);
  const auto path = temp_file("report_rows.csv");
  save_report_csv(path.string(), rows);

  const CsvTable t = CsvTable::load(path.string());
  REQUIRE(t.rows() == 12);
  CHECK(t.cell(0, t.column("partition")) == "overall");
  CHECK(t.cell(0, t.column("metric")) == "rmse");
  CHECK(t.number(0, t.column("mean")) == 2.5);
  CHECK(t.number(0, t.column("std")) == std::sqrt(3.5));
  CHECK(t.number(0, t.column("q75")) == 3.75);
  CHECK(t.integer(4, t.column("count")) == 3);
  std::filesystem::remove(path);
}

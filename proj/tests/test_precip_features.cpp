#include <doctest.h>

#include <vector>

#include "floodgen/precip_features.hpp"
#include "helpers.hpp"

using namespace floodgen;
using testing::code;
using testing::grid_mesh;
using testing::rect_cell;
using testing::thrown_code;

TEST_CASE("heavy indicator uses a strict threshold") {
  CHECK(heavy_indicator(2.5) == 1);
  CHECK(heavy_indicator(2.0) == 0);
  CHECK(heavy_indicator(0.0) == 0);
  CHECK(heavy_indicator(0.5, 0.4) == 1);
  CHECK(thrown_code([] { (void)heavy_indicator(-0.1); }) ==
        code(errc::negative_precipitation));
}

TEST_CASE("heavy ratio weighs cells by area") {
  // two cells with 3:1 area split, same watershed
  std::vector<Cell> cells;
  cells.push_back(rect_cell(0, 29.0, -95.0, 0.03, 0.01));
  cells.push_back(rect_cell(1, 29.0, -94.99, 0.01, 0.01));
  const Mesh mesh = Mesh::from_cells(std::move(cells));
  const std::int32_t ids[] = {0, 1};

  std::vector<double> v = {3.0, 1.0};  // only the big cell is heavy
  CHECK(heavy_ratio(mesh, ids, v) == doctest::Approx(0.75).epsilon(1e-12));
  v = {3.0, 3.0};
  CHECK(heavy_ratio(mesh, ids, v) == 1.0);
  v = {1.0, 1.0};
  CHECK(heavy_ratio(mesh, ids, v) == 0.0);
  CHECK(thrown_code([&] {
          (void)heavy_ratio(mesh, std::span<const std::int32_t>{}, v);
        }) == code(errc::empty_watershed));
}

TEST_CASE("raising the threshold never raises the ratio") {
  const Mesh mesh = grid_mesh(4, 4);
  std::vector<std::int32_t> ids;
  for (std::size_t i = 0; i < mesh.cell_count(); ++i) ids.push_back((std::int32_t)i);
  std::vector<double> v(mesh.cell_count());
  Rng rng(3, 0);
  for (auto& x : v) x = 5.0 * rng.next_double();
  double prev = 1.0;
  for (double t = 0.0; t <= 5.0; t += 0.25) {
    const double r = heavy_ratio(mesh, ids, v, t);
    CHECK(r <= prev);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    prev = r;
  }
}

TEST_CASE("event ratios split cumulative and peak per watershed") {
  const Mesh mesh = grid_mesh(4, 1, 2);  // two watersheds of two cells each
  StormEvent ev;
  ev.duration_h = 6.0;
  ev.cumulative_in = {3.0, 1.0, 1.0, 1.0};  // watershed 0 half heavy
  ev.peak_in = {1.0, 0.5, 0.5, 0.5};        // nothing heavy
  const EventRatios r = event_ratios(mesh, ev);
  REQUIRE(r.hcpr.size() == 2);
  REQUIRE(r.hppr.size() == 2);
  CHECK(r.hcpr[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.hcpr[1] == 0.0);
  CHECK(r.hppr[0] == 0.0);
  CHECK(r.hppr[1] == 0.0);

  ev.cumulative_in = {0.0, 0.0, 0.0, 0.0};
  ev.peak_in = {0.0, 0.0, 0.0, 0.0};
  const EventRatios zero = event_ratios(mesh, ev);
  for (double x : zero.hcpr) CHECK(x == 0.0);
  for (double x : zero.hppr) CHECK(x == 0.0);

  ev.cumulative_in = {1.0, 1.0};  // wrong length
  CHECK(thrown_code([&] { (void)event_ratios(mesh, ev); }) ==
        code(errc::length_mismatch));
}

TEST_CASE("feature rows follow the documented layouts") {
  const Mesh mesh = grid_mesh(4, 1, 2);
  CHECK(cellwise_feature_count(mesh) == 7);  // 3 + 2 watersheds * 2
  CHECK(kUniversalFeatureCount == 5);

  const auto cw_names = cellwise_feature_names(mesh);
  REQUIRE(cw_names.size() == 7);
  CHECK(cw_names[0] == "cumulative_in");
  CHECK(cw_names[1] == "peak_in");
  CHECK(cw_names[2] == "duration_h");
  CHECK(cw_names[3] == "hcpr_0");
  CHECK(cw_names[5] == "hppr_0");
  const auto u_names = universal_feature_names();
  REQUIRE(u_names.size() == 5);
  CHECK(u_names[3] == "channel");
  CHECK(u_names[4] == "elevation_ft");

  StormEvent ev;
  ev.duration_h = 9.0;
  ev.cumulative_in = {3.0, 1.0, 1.0, 1.0};
  ev.peak_in = {1.0, 0.5, 0.5, 0.5};
  const EventRatios r = event_ratios(mesh, ev);

  std::vector<double> cw(7);
  cellwise_features(mesh, ev, r, 1, cw);
  CHECK(cw[0] == 1.0);
  CHECK(cw[1] == 0.5);
  CHECK(cw[2] == 9.0);
  CHECK(cw[3] == r.hcpr[0]);
  CHECK(cw[4] == r.hcpr[1]);
  CHECK(cw[5] == r.hppr[0]);
  CHECK(cw[6] == r.hppr[1]);

  std::vector<double> u(5);
  universal_features(mesh, ev, 1, u);
  CHECK(u[0] == 1.0);
  CHECK(u[1] == 0.5);
  CHECK(u[2] == 9.0);
  CHECK(u[3] == (mesh.cell(1).channel ? 1.0 : 0.0));
  CHECK(u[4] == mesh.cell(1).elevation_ft);
}

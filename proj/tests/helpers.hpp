#pragma once

// Builders shared by the unit tests: small rectangular meshes and storm
// events with controllable precipitation and depth fields.

#include <cmath>
#include <vector>

#include "floodgen/common.hpp"
#include "floodgen/mesh.hpp"
#include "floodgen/rng.hpp"

namespace testing {

inline floodgen::Cell rect_cell(std::int32_t id, double lat0, double lon0, double dlat,
                                double dlon, std::int32_t watershed = 0,
                                bool channel = false) {
  floodgen::Cell c;
  c.cell_id = id;
  c.watershed_id = watershed;
  c.channel = channel;
  c.centroid = {lat0 + dlat / 2.0, lon0 + dlon / 2.0};
  c.polygon = {{lat0, lon0}, {lat0, lon0 + dlon}, {lat0 + dlat, lon0 + dlon},
               {lat0 + dlat, lon0}};
  c.elevation_ft = 40.0 + id;
  return c;
}

// nx-by-ny grid of equal square cells; watershed bands along x; one optional
// channel row.
inline floodgen::Mesh grid_mesh(int nx, int ny, std::int32_t watersheds = 1,
                                int channel_row = -1, double spacing = 0.01,
                                double lat0 = 29.0, double lon0 = -95.0) {
  std::vector<floodgen::Cell> cells;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const auto w = static_cast<std::int32_t>(
          static_cast<std::int64_t>(ix) * watersheds / nx);
      cells.push_back(rect_cell(iy * nx + ix, lat0 + iy * spacing, lon0 + ix * spacing,
                                spacing, spacing, w, iy == channel_row));
    }
  return floodgen::Mesh::from_cells(std::move(cells), watersheds);
}

// Events with per-cell precipitation and depths following a per-cell linear
// response, so estimators have real signal to learn.
inline std::vector<floodgen::StormEvent> linear_events(const floodgen::Mesh& mesh,
                                                       std::size_t n,
                                                       std::uint64_t seed,
                                                       bool with_depth = true) {
  std::vector<floodgen::StormEvent> events(n);
  floodgen::Rng rng(seed, 0);
  const std::size_t nc = mesh.cell_count();
  for (std::size_t e = 0; e < n; ++e) {
    auto& ev = events[e];
    ev.event_id = static_cast<std::int64_t>(e);
    ev.duration_h = 3.0 + static_cast<double>(rng.next_below(30));
    ev.cumulative_in.resize(nc);
    ev.peak_in.resize(nc);
    if (with_depth) ev.depth_ft.resize(nc);
    const double base = 0.5 + 5.0 * rng.next_double();
    for (std::size_t c = 0; c < nc; ++c) {
      const double cum = base * (0.8 + 0.4 * rng.next_double());
      const double peak = cum * (0.3 + 0.4 * rng.next_double());
      ev.cumulative_in[c] = cum;
      ev.peak_in[c] = peak;
      if (with_depth) {
        const double a = 0.05 + 0.002 * static_cast<double>(c % 17);
        const double b = 0.03 + 0.001 * static_cast<double>(c % 11);
        ev.depth_ft[c] = std::max(0.0, a * cum + b * peak - 0.1);
      }
    }
  }
  return events;
}

// Runs `f` and reports the error code it threw, or a sentinel when it ran
// through or threw something else.
template <typename F>
inline int thrown_code(F&& f) {
  try {
    f();
  } catch (const floodgen::Error& e) {
    return static_cast<int>(e.code());
  } catch (...) {
    return -2;
  }
  return -1;
}

inline int code(floodgen::errc c) { return static_cast<int>(c); }

}  // namespace testing

#include "floodgen/bench.hpp"

#include <algorithm>
#include <cmath>

#include "floodgen/common.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

namespace {

struct CellResponse {
  double a;    // weight on cumulative (ft per inch)
  double b;    // weight on peak (ft per inch)
  double off;  // activation offset (ft)
};

constexpr double kDurationWeight = 0.004;  // ft per hour

CellResponse cell_response(std::uint64_t seed, std::size_t cell) {
  Rng rng(seed, 0x1000000000000000ull + cell);
  return {0.08 + 0.42 * rng.next_double(), 0.10 + 0.60 * rng.next_double(),
          0.30 + 0.70 * rng.next_double()};
}

double cell_depth(const CellResponse& r, double cum, double peak, double dur) {
  return std::max(0.0, r.a * cum + r.b * peak + kDurationWeight * dur - r.off);
}

struct Bump {
  double x, y, sigma;
};

}  // namespace

Benchmark make_benchmark(const BenchConfig& cfg) {
  if (cfg.grid_x < 2 || cfg.grid_y < 2 || cfg.watersheds < 1 || cfg.n_events < 7)
    fail(errc::bad_config, "benchmark needs a 2x2+ grid and >= 7 events");

  const int nx = cfg.grid_x, ny = cfg.grid_y;
  const std::size_t n_cells = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  Rng grid_rng(cfg.seed, 1);

  std::vector<Cell> sites(n_cells);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t id = static_cast<std::size_t>(iy) * nx + ix;
      Cell& c = sites[id];
      c.cell_id = static_cast<std::int32_t>(id);
      const double jx = (grid_rng.next_double() - 0.5) * 0.5;
      const double jy = (grid_rng.next_double() - 0.5) * 0.5;
      c.centroid = {cfg.origin_lat + (iy + jy) * cfg.spacing_deg,
                    cfg.origin_lon + (ix + jx) * cfg.spacing_deg};
      c.watershed_id = static_cast<std::int32_t>(
          std::min<long long>(cfg.watersheds - 1,
                              static_cast<long long>(ix) * cfg.watersheds / nx));
      c.channel = iy == ny / 2;
      const double raw_elev =
          50.0 + 2.0 * ix + 1.5 * iy + 6.0 * (grid_rng.next_double() - 0.5);
      // Coarse 10 ft steps so elevation never identifies a single cell.
      c.elevation_ft = 10.0 * std::round(raw_elev / 10.0) - (c.channel ? 10.0 : 0.0);
    }
  Mesh mesh = Mesh::from_centroids(std::move(sites));

  const auto& xy = mesh.centroids_xy();
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const Vec2& v : xy) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  const double spanx = maxx - minx, spany = maxy - miny;

  std::vector<CellResponse> resp(mesh.cell_count());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) resp[c] = cell_response(cfg.seed, c);

  // Event mean-depth targets cover the three depth classes (bounds at 2 in and
  // 6 in of mean depth): sevenths of the run go 2 low : 4 medium : 1 high,
  // plus margin so class membership is insensitive to rounding.
  const auto target_mean = [&](int e) {
    const int n = cfg.n_events;
    const int low_n = 2 * n / 7, mid_n = 4 * n / 7;
    if (e < low_n)
      return 0.070 + 0.060 * e / std::max(1, low_n - 1);          // 0.84..1.56 in
    if (e < low_n + mid_n)
      return 0.280 + 0.170 * (e - low_n) / std::max(1, mid_n - 1);  // 3.4..5.4 in
    return 0.700 + 0.400 * (e - low_n - mid_n) /
                       std::max(1, n - low_n - mid_n - 1);          // 8.4..13.2 in
  };
  const double durations[10] = {3, 6, 9, 12, 15, 18, 24, 30, 36, 48};

  std::vector<StormEvent> events(static_cast<std::size_t>(cfg.n_events));
  for (int e = 0; e < cfg.n_events; ++e) {
    Rng rng(cfg.seed, 2000 + static_cast<std::uint64_t>(e));
    StormEvent& ev = events[static_cast<std::size_t>(e)];
    ev.event_id = e;
    ev.duration_h = durations[rng.next_below(10)];

    const std::size_t n_bumps = 1 + rng.next_below(3);
    std::vector<Bump> bumps(n_bumps);
    for (Bump& b : bumps) {
      b.x = minx + rng.next_double() * spanx;
      b.y = miny + rng.next_double() * spany;
      b.sigma = (0.15 + 0.25 * rng.next_double()) * std::min(spanx, spany);
    }
    const double base = 0.05 + 0.25 * rng.next_double();
    const double peak_frac = 0.25 + 0.40 * rng.next_double();

    std::vector<double> shape(mesh.cell_count());
    std::vector<double> frac(mesh.cell_count());
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
      double s = 0.0;
      for (const Bump& b : bumps) {
        const double dx = xy[c].x - b.x, dy = xy[c].y - b.y;
        s += std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
      }
      shape[c] = s;
      frac[c] = std::clamp(peak_frac + 0.15 * (rng.next_double() - 0.5), 0.05, 0.95);
    }

    const auto mean_depth_at = [&](double amp) {
      double sum = 0.0;
      for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
        const double cum = base + amp * shape[c];
        sum += cell_depth(resp[c], cum, frac[c] * cum, ev.duration_h);
      }
      return sum / static_cast<double>(mesh.cell_count());
    };
    double lo = 0.0, hi = 80.0;
    const double want = target_mean(e);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mean_depth_at(mid) < want ? lo : hi) = mid;
    }
    const double amp = 0.5 * (lo + hi);

    ev.cumulative_in.resize(mesh.cell_count());
    ev.peak_in.resize(mesh.cell_count());
    ev.depth_ft.resize(mesh.cell_count());
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
      ev.cumulative_in[c] = base + amp * shape[c];
      ev.peak_in[c] = frac[c] * ev.cumulative_in[c];
      ev.depth_ft[c] =
          cell_depth(resp[c], ev.cumulative_in[c], ev.peak_in[c], ev.duration_h);
    }
  }
  return {std::move(mesh), std::move(events)};
}

PointCloud points_from_events(const Mesh& mesh, std::span<const StormEvent> events) {
  if (events.empty()) fail(errc::empty_dataset, "no events to convert");
  PointCloud cloud;
  cloud.reserve(events.size() * mesh.cell_count());
  for (const StormEvent& ev : events)
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
      const LatLon ctr = mesh.cell(static_cast<std::int32_t>(c)).centroid;
      cloud.push({ctr.lat, ctr.lon, ev.cumulative_in[c], ev.peak_in[c], ev.duration_h});
    }
  return cloud;
}

PointCloud make_correlated_points(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  // Inner box of the centroid extent keeps every location inside the boundary.
  double minla = 1e300, maxla = -1e300, minlo = 1e300, maxlo = -1e300;
  for (const Cell& c : mesh.cells()) {
    minla = std::min(minla, c.centroid.lat);
    maxla = std::max(maxla, c.centroid.lat);
    minlo = std::min(minlo, c.centroid.lon);
    maxlo = std::max(maxlo, c.centroid.lon);
  }
  const double la0 = minla + 0.15 * (maxla - minla), la1 = maxla - 0.15 * (maxla - minla);
  const double lo0 = minlo + 0.15 * (maxlo - minlo), lo1 = maxlo - 0.15 * (maxlo - minlo);

  PointCloud cloud;
  cloud.reserve(n);
  Rng rng(seed);
  std::size_t made = 0;
  while (made < n) {
    const double lat = la0 + rng.next_double() * (la1 - la0);
    const double lon = lo0 + rng.next_double() * (lo1 - lo0);
    if (!mesh.contains({lat, lon})) continue;
    const double z1 = rng.next_normal();
    const double z2 = 0.9 * z1 + std::sqrt(1.0 - 0.81) * rng.next_normal();
    const double z3 = 0.5 * z1 + std::sqrt(1.0 - 0.25) * rng.next_normal();
    const double cum = 0.4 + 4.0 * std::exp(0.5 * z1);
    const double dur = std::clamp(std::round(6.0 + 6.0 * std::exp(0.4 * z3)), 4.0, 72.0);
    // Peak tracks cumulative through a narrow, tightly correlated fraction
    // band (0.40, 0.55): far above 1/duration <= 0.25 and far below 1, so the
    // precipitation constraints hold with margin even after resampling.
    const double f = 0.40 + 0.15 * norm_cdf(z2);
    cloud.push({lat, lon, cum, f * cum, dur});
    ++made;
  }
  return cloud;
}

}  // namespace floodgen

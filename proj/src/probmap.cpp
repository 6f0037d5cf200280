#include "floodgen/probmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "floodgen/common.hpp"
#include "floodgen/png_writer.hpp"

namespace floodgen {

ProbabilityMap probability_map(const Mesh& mesh, std::span<const SyntheticEvent> events,
                               double threshold_ft) {
  if (events.empty()) fail(errc::empty_batch, "probability map needs >= 1 event");
  for (const SyntheticEvent& ev : events)
    if (ev.mesh_fingerprint != mesh.fingerprint())
      fail(errc::mesh_fingerprint_mismatch,
           "event " + std::to_string(ev.event_id) + " was generated on a different mesh");
  ProbabilityMap map;
  map.threshold_ft = threshold_ft;
  map.n_events = events.size();
  map.mesh_fingerprint = mesh.fingerprint();
  map.probability.assign(mesh.cell_count(), 0.0);
  for (const SyntheticEvent& ev : events)
    for (std::size_t c = 0; c < mesh.cell_count(); ++c)
      if (ev.depth_ft[c] >= threshold_ft) map.probability[c] += 1.0;
  for (double& p : map.probability) p /= static_cast<double>(events.size());
  return map;
}

ProbabilityMap probability_map_from_depths(std::span<const std::vector<double>> depths,
                                           double threshold_ft,
                                           const std::string& mesh_fingerprint) {
  if (depths.empty()) fail(errc::empty_batch, "probability map needs >= 1 event");
  const std::size_t n_cells = depths.front().size();
  for (const auto& d : depths)
    if (d.size() != n_cells)
      fail(errc::length_mismatch, "event depth fields must cover the same cells");
  ProbabilityMap map;
  map.threshold_ft = threshold_ft;
  map.n_events = depths.size();
  map.mesh_fingerprint = mesh_fingerprint;
  map.probability.assign(n_cells, 0.0);
  for (const auto& d : depths)
    for (std::size_t c = 0; c < n_cells; ++c)
      if (d[c] >= threshold_ft) map.probability[c] += 1.0;
  for (double& p : map.probability) p /= static_cast<double>(depths.size());
  return map;
}

void save_probmap_geojson(const std::string& path, const Mesh& mesh,
                          const ProbabilityMap& map) {
  if (map.probability.size() != mesh.cell_count())
    fail(errc::length_mismatch, "map does not cover the mesh");
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const Cell& c : mesh.cells()) {
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const LatLon& p : c.polygon) coords.push_back({p.lon, p.lat});
    if (!c.polygon.empty()) coords.push_back({c.polygon.front().lon, c.polygon.front().lat});
    features.push_back(
        {{"type", "Feature"},
         {"properties",
          {{"cell_id", c.cell_id},
           {"channel", c.channel ? 1 : 0},
           {"probability", map.probability[static_cast<std::size_t>(c.cell_id)]}}},
         {"geometry", {{"type", "Polygon"}, {"coordinates", {coords}}}}});
  }
  nlohmann::ordered_json doc = {{"type", "FeatureCollection"},
                                {"threshold_ft", map.threshold_ft},
                                {"n_events", map.n_events},
                                {"mesh_fingerprint", map.mesh_fingerprint},
                                {"features", features}};
  write_file_atomic(path, doc.dump(1));
}

std::vector<double> load_probmap_geojson(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_data, "invalid map file " + path + ": " + e.what());
  }
  std::vector<std::pair<std::int32_t, double>> entries;
  for (const auto& f : doc.value("features", nlohmann::json::array()))
    entries.emplace_back(f.at("properties").at("cell_id").get<std::int32_t>(),
                         f.at("properties").at("probability").get<double>());
  std::sort(entries.begin(), entries.end());
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& [id, p] : entries) out.push_back(p);
  return out;
}

void save_probmap_csv(const std::string& path, const ProbabilityMap& map) {
  std::ostringstream out;
  out << "cell_id,probability\n";
  for (std::size_t c = 0; c < map.probability.size(); ++c)
    out << c << ',' << format_double(map.probability[c]) << "\n";
  write_file_atomic(path, out.str());
}

namespace {

// Blue at 0 through red at 1; channel cells ignore the ramp and render gray.
void ramp_color(double p, std::uint8_t* px) {
  p = std::clamp(p, 0.0, 1.0);
  px[0] = static_cast<std::uint8_t>(std::lround(255.0 * p));
  px[1] = 0;
  px[2] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - p)));
}

}  // namespace

void save_probmap_png(const std::string& path, const Mesh& mesh, const ProbabilityMap& map,
                      int raster_width) {
  if (raster_width < 2) fail(errc::bad_config, "raster width must be >= 2");
  if (map.probability.size() != mesh.cell_count())
    fail(errc::length_mismatch, "map does not cover the mesh");

  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const Vec2& v : mesh.boundary_xy()) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  const double spanx = maxx - minx, spany = maxy - miny;
  if (spanx <= 0.0 || spany <= 0.0) fail(errc::bad_data, "degenerate study area extent");
  const int width = raster_width;
  const int height = std::max(2, static_cast<int>(std::lround(width * spany / spanx)));
  const double px_per_ft = static_cast<double>(width) / spanx;

  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) *
                                    static_cast<std::size_t>(height) * 3,
                                255);

  for (const Cell& cell : mesh.cells()) {
    if (cell.polygon.empty()) continue;
    Ring ring;
    ring.reserve(cell.polygon.size());
    for (const LatLon& p : cell.polygon) ring.push_back(mesh.projection().to_plane(p));

    std::uint8_t color[3];
    if (cell.channel) {
      color[0] = color[1] = color[2] = 128;
    } else {
      ramp_color(map.probability[static_cast<std::size_t>(cell.cell_id)], color);
    }

    double cminy = 1e300, cmaxy = -1e300;
    for (const Vec2& v : ring) {
      cminy = std::min(cminy, v.y);
      cmaxy = std::max(cmaxy, v.y);
    }
    const int row_lo = std::max(0, static_cast<int>((maxy - cmaxy) * px_per_ft));
    const int row_hi = std::min(height - 1, static_cast<int>((maxy - cminy) * px_per_ft) + 1);
    std::vector<double> xs;
    for (int row = row_lo; row <= row_hi; ++row) {
      const double y = maxy - (row + 0.5) / px_per_ft;
      xs.clear();
      for (std::size_t i = 0; i < ring.size(); ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % ring.size()];
        if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y))
          xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
        const int col_lo = std::max(0, static_cast<int>(std::ceil((xs[i] - minx) * px_per_ft - 0.5)));
        const int col_hi =
            std::min(width - 1, static_cast<int>(std::floor((xs[i + 1] - minx) * px_per_ft - 0.5)));
        for (int col = col_lo; col <= col_hi; ++col) {
          const std::size_t off =
              (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(col)) *
              3;
          rgb[off] = color[0];
          rgb[off + 1] = color[1];
          rgb[off + 2] = color[2];
        }
      }
    }
  }
  write_png_rgb(path, width, height, rgb);
}

}  // namespace floodgen

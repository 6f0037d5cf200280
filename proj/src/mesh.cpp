#include "floodgen/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "floodgen/common.hpp"
#include "floodgen/csv.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

namespace {

LatLon mean_latlon(std::span<const LatLon> pts) {
  LatLon m{};
  for (const LatLon& p : pts) {
    m.lat += p.lat;
    m.lon += p.lon;
  }
  const double n = static_cast<double>(pts.size());
  return {m.lat / n, m.lon / n};
}

void hash_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  h = fnv1a64(&bits, sizeof(bits), h);
}

}  // namespace

Mesh Mesh::from_cells(std::vector<Cell> cells, std::int32_t watershed_count,
                      std::vector<LatLon> boundary) {
  Mesh m;
  m.cells_ = std::move(cells);
  m.watershed_count_ = watershed_count;
  m.boundary_ = std::move(boundary);
  m.finalize();
  return m;
}

Mesh Mesh::from_centroids(std::vector<Cell> sites, std::vector<LatLon> boundary) {
  if (sites.empty()) fail(errc::bad_data, "no centroid sites");
  std::vector<LatLon> centroids;
  centroids.reserve(sites.size());
  for (const Cell& c : sites) centroids.push_back(c.centroid);
  const Projection proj(mean_latlon(centroids));

  std::vector<Vec2> xy(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) xy[i] = proj.to_plane(centroids[i]);

  Ring region_xy;
  if (!boundary.empty()) {
    region_xy.reserve(boundary.size());
    for (const LatLon& p : boundary) region_xy.push_back(proj.to_plane(p));
  } else {
    // Pad the site hull outward by half the median nearest-neighbor spacing
    // so hull sites get non-degenerate cells.
    region_xy = convex_hull(xy);
    std::vector<double> nn(sites.size(), std::numeric_limits<double>::max());
    for (std::size_t i = 0; i < xy.size(); ++i)
      for (std::size_t j = 0; j < xy.size(); ++j) {
        if (i == j) continue;
        const double dx = xy[i].x - xy[j].x, dy = xy[i].y - xy[j].y;
        nn[i] = std::min(nn[i], dx * dx + dy * dy);
      }
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    const double pad = 0.5 * std::sqrt(nn[nn.size() / 2]);
    const Vec2 c = ring_centroid(region_xy);
    for (Vec2& v : region_xy) {
      const double dx = v.x - c.x, dy = v.y - c.y;
      const double len = std::hypot(dx, dy);
      if (len > 0) {
        v.x += pad * dx / len;
        v.y += pad * dy / len;
      }
    }
    boundary.clear();
    boundary.reserve(region_xy.size());
    for (const Vec2& v : region_xy) boundary.push_back(proj.to_latlon(v));
  }

  for (std::size_t i = 0; i < sites.size(); ++i) {
    Ring cell = voronoi_cell(xy, i, region_xy);
    if (cell.size() < 3) fail(errc::bad_data, "degenerate Voronoi cell for site " +
                                                  std::to_string(sites[i].cell_id));
    sites[i].polygon.clear();
    sites[i].polygon.reserve(cell.size());
    for (const Vec2& v : cell) sites[i].polygon.push_back(proj.to_latlon(v));
  }
  return from_cells(std::move(sites), 0, std::move(boundary));
}

void Mesh::finalize() {
  if (cells_.empty()) fail(errc::bad_data, "mesh has no cells");
  const std::size_t n = cells_.size();

  std::sort(cells_.begin(), cells_.end(),
            [](const Cell& a, const Cell& b) { return a.cell_id < b.cell_id; });
  for (std::size_t i = 0; i < n; ++i)
    if (cells_[i].cell_id != static_cast<std::int32_t>(i))
      fail(errc::bad_data, "cell ids must be unique and dense in [0, n); got id " +
                               std::to_string(cells_[i].cell_id) + " at position " +
                               std::to_string(i));

  std::int32_t max_ws = -1;
  for (const Cell& c : cells_) max_ws = std::max(max_ws, c.watershed_id);
  if (watershed_count_ == 0) watershed_count_ = max_ws + 1;
  if (max_ws >= watershed_count_ || watershed_count_ <= 0)
    fail(errc::bad_data, "watershed id out of range");

  // Projection about the mean centroid. Cells lacking centroids get them
  // from their polygon first (affine-equivariant, so degree-space shoelace
  // is exact here).
  for (Cell& c : cells_) {
    if (c.polygon.empty() && (c.centroid.lat == 0.0 && c.centroid.lon == 0.0))
      fail(errc::bad_data, "cell " + std::to_string(c.cell_id) +
                               " has neither polygon nor centroid");
    if (!c.polygon.empty() && c.centroid.lat == 0.0 && c.centroid.lon == 0.0) {
      std::vector<Vec2> deg;
      deg.reserve(c.polygon.size());
      for (const LatLon& p : c.polygon) deg.push_back({p.lon, p.lat});
      const Vec2 g = ring_centroid(deg);
      c.centroid = {g.y, g.x};
    }
  }
  std::vector<LatLon> centroids;
  centroids.reserve(n);
  for (const Cell& c : cells_) centroids.push_back(c.centroid);
  proj_ = Projection(mean_latlon(centroids));

  centroid_xy_.resize(n);
  for (std::size_t i = 0; i < n; ++i) centroid_xy_[i] = proj_.to_plane(centroids[i]);

  // Areas from polygons; boundary fallback from all vertices.
  std::vector<Vec2> all_vertices;
  for (Cell& c : cells_) {
    if (c.polygon.empty()) continue;
    Ring ring;
    ring.reserve(c.polygon.size());
    for (const LatLon& p : c.polygon) {
      ring.push_back(proj_.to_plane(p));
      all_vertices.push_back(ring.back());
    }
    if (c.area_sqft <= 0.0) c.area_sqft = std::fabs(ring_area(ring));
    if (c.area_sqft <= 0.0)
      fail(errc::bad_data, "cell " + std::to_string(c.cell_id) + " has zero area");
    if (!point_in_ring(proj_.to_plane(c.centroid), ring))
      fail(errc::bad_data, "cell " + std::to_string(c.cell_id) +
                               " polygon does not contain its centroid");
  }
  for (Cell& c : cells_) {
    if (c.polygon.empty() && c.area_sqft <= 0.0) c.area_sqft = 1.0;
  }

  if (boundary_.empty()) {
    Ring hull = convex_hull(all_vertices.empty() ? centroid_xy_ : all_vertices);
    boundary_.reserve(hull.size());
    for (const Vec2& v : hull) boundary_.push_back(proj_.to_latlon(v));
  }
  if (boundary_.size() < 3) fail(errc::bad_data, "study-area boundary is degenerate");
  boundary_xy_.clear();
  boundary_xy_.reserve(boundary_.size());
  for (const LatLon& p : boundary_) boundary_xy_.push_back(proj_.to_plane(p));

  // Watershed tables.
  watershed_area_.assign(watershed_count_, 0.0);
  std::vector<std::vector<std::int32_t>> members(watershed_count_);
  for (const Cell& c : cells_) {
    watershed_area_[c.watershed_id] += c.area_sqft;
    members[c.watershed_id].push_back(c.cell_id);
  }
  ws_cells_offset_.assign(watershed_count_ + 1, 0);
  for (std::int32_t w = 0; w < watershed_count_; ++w) {
    if (members[w].empty())
      fail(errc::bad_data, "watershed " + std::to_string(w) + " owns no cells");
    ws_cells_offset_[w + 1] = ws_cells_offset_[w] + members[w].size();
  }
  ws_cells_flat_.clear();
  ws_cells_flat_.reserve(n);
  for (auto& v : members) ws_cells_flat_.insert(ws_cells_flat_.end(), v.begin(), v.end());

  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Cell& c : cells_) {
    const std::int64_t id = c.cell_id;
    h = fnv1a64(&id, sizeof(id), h);
    hash_double(h, c.centroid.lat);
    hash_double(h, c.centroid.lon);
  }
  fingerprint_ = to_hex64(h);
}

std::span<const std::int32_t> Mesh::watershed_cells(std::int32_t w) const {
  return {ws_cells_flat_.data() + ws_cells_offset_[w],
          ws_cells_offset_[w + 1] - ws_cells_offset_[w]};
}

bool Mesh::contains(LatLon p) const {
  return point_in_ring(proj_.to_plane(p), boundary_xy_);
}

std::int32_t Mesh::assign_point(LatLon p) const {
  const Vec2 q = proj_.to_plane(p);
  if (!point_in_ring(q, boundary_xy_))
    fail(errc::point_outside_study_area,
         "point (" + std::to_string(p.lat) + ", " + std::to_string(p.lon) +
             ") lies outside the study area");
  std::int32_t best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < centroid_xy_.size(); ++i) {
    const double dx = centroid_xy_[i].x - q.x;
    const double dy = centroid_xy_[i].y - q.y;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

std::int32_t assign_point_to_cell(LatLon point, const Mesh& mesh) {
  return mesh.assign_point(point);
}

// ---------------------------------------------------------------------------
// GeoJSON

Mesh Mesh::load_geojson(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_data, "invalid GeoJSON in " + path + ": " + e.what());
  }
  if (!doc.contains("features")) fail(errc::bad_data, path + ": not a FeatureCollection");

  std::vector<Cell> cells;
  std::vector<Cell> sites;
  std::vector<LatLon> boundary;
  for (const auto& f : doc["features"]) {
    const auto& props = f.value("properties", nlohmann::json::object());
    const auto& geom = f.value("geometry", nlohmann::json::object());
    const std::string type = geom.value("type", "");
    if (props.value("boundary", 0) != 0 || props.value("role", "") == "boundary") {
      if (type != "Polygon") fail(errc::bad_data, path + ": boundary must be a Polygon");
      for (const auto& v : geom["coordinates"][0])
        boundary.push_back({v[1].get<double>(), v[0].get<double>()});
      if (boundary.size() > 1) {
        const LatLon& a = boundary.front();
        const LatLon& b = boundary.back();
        if (a.lat == b.lat && a.lon == b.lon) boundary.pop_back();
      }
      continue;
    }
    Cell c;
    if (!props.contains("cell_id")) fail(errc::bad_data, path + ": feature lacks cell_id");
    c.cell_id = props["cell_id"].get<std::int32_t>();
    c.watershed_id = props.value("watershed_id", 0);
    c.channel = props.value("channel", 0) != 0;
    c.elevation_ft = props.value("elevation_ft", 0.0);
    if (props.contains("centroid_lat") && props.contains("centroid_lon"))
      c.centroid = {props["centroid_lat"].get<double>(), props["centroid_lon"].get<double>()};
    if (type == "Polygon") {
      const auto& ring = geom["coordinates"][0];
      for (const auto& v : ring)
        c.polygon.push_back({v[1].get<double>(), v[0].get<double>()});
      if (c.polygon.size() > 1) {
        const LatLon& a = c.polygon.front();
        const LatLon& b = c.polygon.back();
        if (a.lat == b.lat && a.lon == b.lon) c.polygon.pop_back();
      }
      cells.push_back(std::move(c));
    } else if (type == "Point") {
      const auto& v = geom["coordinates"];
      c.centroid = {v[1].get<double>(), v[0].get<double>()};
      sites.push_back(std::move(c));
    } else {
      fail(errc::bad_data, path + ": unsupported geometry type '" + type + "'");
    }
  }
  if (!cells.empty() && !sites.empty())
    fail(errc::bad_data, path + ": mixes Polygon cells and Point sites");
  if (!cells.empty()) return from_cells(std::move(cells), 0, std::move(boundary));
  if (!sites.empty()) return from_centroids(std::move(sites), std::move(boundary));
  fail(errc::bad_data, path + ": no cell features");
}

void Mesh::save_geojson(const std::string& path) const {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const Cell& c : cells_) {
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const LatLon& p : c.polygon) coords.push_back({p.lon, p.lat});
    if (!c.polygon.empty()) coords.push_back({c.polygon.front().lon, c.polygon.front().lat});
    nlohmann::ordered_json f = {
        {"type", "Feature"},
        {"properties",
         {{"cell_id", c.cell_id},
          {"watershed_id", c.watershed_id},
          {"channel", c.channel ? 1 : 0},
          {"elevation_ft", c.elevation_ft},
          {"centroid_lat", c.centroid.lat},
          {"centroid_lon", c.centroid.lon}}},
        {"geometry", {{"type", "Polygon"}, {"coordinates", {coords}}}}};
    features.push_back(std::move(f));
  }
  nlohmann::ordered_json bcoords = nlohmann::ordered_json::array();
  for (const LatLon& p : boundary_) bcoords.push_back({p.lon, p.lat});
  bcoords.push_back({boundary_.front().lon, boundary_.front().lat});
  features.push_back({{"type", "Feature"},
                      {"properties", {{"boundary", 1}}},
                      {"geometry", {{"type", "Polygon"}, {"coordinates", {bcoords}}}}});
  nlohmann::ordered_json doc = {{"type", "FeatureCollection"}, {"features", features}};
  write_file_atomic(path, doc.dump(1));
}

// ---------------------------------------------------------------------------
// Events

double event_mean_depth(const StormEvent& event) {
  if (!event.has_depth())
    fail(errc::missing_depths, "event " + std::to_string(event.event_id) + " has no depths");
  double s = 0.0;
  for (double d : event.depth_ft) s += d;
  return s / static_cast<double>(event.depth_ft.size());
}

std::vector<StormEvent> load_events_csv(const std::string& path, const Mesh& mesh) {
  const CsvTable t = CsvTable::load(path);
  const int c_event = t.column("event_id");
  const int c_cell = t.column("cell_id");
  const int c_cum = t.column("cumulative_in");
  const int c_peak = t.column("peak_in");
  const int c_dur = t.column("duration_h");
  const int c_depth = t.column("max_depth_ft", false);

  const std::size_t n_cells = mesh.cell_count();
  std::map<std::int64_t, StormEvent> by_id;
  std::map<std::int64_t, std::size_t> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::int64_t eid = t.integer(r, c_event);
    const long long cell = t.integer(r, c_cell);
    if (cell < 0 || cell >= static_cast<long long>(n_cells))
      fail(errc::bad_data, path + ": cell_id " + std::to_string(cell) + " not in mesh");
    auto& ev = by_id[eid];
    if (ev.cumulative_in.empty()) {
      ev.event_id = eid;
      ev.cumulative_in.assign(n_cells, -1.0);
      ev.peak_in.assign(n_cells, 0.0);
      ev.duration_h = t.number(r, c_dur);
      if (c_depth >= 0) ev.depth_ft.assign(n_cells, 0.0);
    }
    if (ev.cumulative_in[cell] >= 0.0)
      fail(errc::bad_data, path + ": duplicate (event, cell) row for event " +
                               std::to_string(eid) + " cell " + std::to_string(cell));
    const double cum = t.number(r, c_cum);
    const double peak = t.number(r, c_peak);
    const double dur = t.number(r, c_dur);
    if (cum < 0.0 || peak < 0.0)
      fail(errc::bad_data, path + ": negative precipitation for event " + std::to_string(eid));
    if (cum > 0.0 && peak > 0.0 && cum < peak)
      fail(errc::bad_data, path + ": cumulative < peak for event " + std::to_string(eid) +
                               " cell " + std::to_string(cell));
    if (dur != ev.duration_h)
      fail(errc::bad_data, path + ": inconsistent duration within event " + std::to_string(eid));
    ev.cumulative_in[cell] = cum;
    ev.peak_in[cell] = peak;
    if (c_depth >= 0) {
      const double d = t.number(r, c_depth);
      if (d < 0.0) fail(errc::bad_data, path + ": negative depth for event " + std::to_string(eid));
      ev.depth_ft[cell] = d;
    }
    ++seen[eid];
  }
  std::vector<StormEvent> out;
  out.reserve(by_id.size());
  for (auto& [eid, ev] : by_id) {
    if (seen[eid] != n_cells)
      fail(errc::missing_cells, path + ": event " + std::to_string(eid) + " covers " +
                                    std::to_string(seen[eid]) + " of " +
                                    std::to_string(n_cells) + " cells");
    if (ev.duration_h < 1.0)
      fail(errc::bad_data, path + ": event " + std::to_string(eid) + " duration < 1 h");
    out.push_back(std::move(ev));
  }
  if (out.empty()) fail(errc::bad_data, path + ": no events");
  return out;
}

void save_events_csv(const std::string& path, std::span<const StormEvent> events) {
  std::ostringstream out;
  const bool depths = !events.empty() && events.front().has_depth();
  out << "event_id,cell_id,cumulative_in,peak_in,duration_h";
  if (depths) out << ",max_depth_ft";
  out << "\n";
  for (const StormEvent& ev : events) {
    for (std::size_t c = 0; c < ev.cumulative_in.size(); ++c) {
      out << ev.event_id << ',' << c << ',' << format_double(ev.cumulative_in[c]) << ','
          << format_double(ev.peak_in[c]) << ',' << format_double(ev.duration_h);
      if (depths) out << ',' << format_double(ev.depth_ft[c]);
      out << "\n";
    }
  }
  write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Stratified split

SplitResult stratified_split(std::span<const StormEvent> events, const SplitConfig& cfg) {
  const std::size_t ratio_sum = static_cast<std::size_t>(cfg.ratio[0]) + cfg.ratio[1] + cfg.ratio[2];
  if (ratio_sum == 0) fail(errc::bad_config, "split ratio sums to zero");
  if (events.size() < ratio_sum)
    fail(errc::insufficient_events, "need at least " + std::to_string(ratio_sum) +
                                        " events, have " + std::to_string(events.size()));

  // Class by mean depth, converted feet -> inches.
  std::array<std::vector<std::size_t>, 3> classes;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double mean_in = event_mean_depth(events[i]) * 12.0;
    int c = mean_in <= cfg.class_bounds_in[0] ? 0 : (mean_in <= cfg.class_bounds_in[1] ? 1 : 2);
    classes[c].push_back(i);
  }

  SplitResult res;
  for (int c = 0; c < 3; ++c) res.class_counts[c] = classes[c].size();

  // Largest k with k * ratio available in every needed class.
  std::size_t kmax = std::numeric_limits<std::size_t>::max();
  for (int c = 0; c < 3; ++c) {
    if (cfg.ratio[c] == 0) continue;
    kmax = std::min(kmax, classes[c].size() / static_cast<std::size_t>(cfg.ratio[c]));
  }
  if (kmax == 0)
    fail(errc::insufficient_events, "a class required by the ratio is empty or too small");

  std::array<std::size_t, 3> pool_take{};
  if (cfg.train_pool == 0) {
    for (int c = 0; c < 3; ++c) pool_take[c] = kmax * static_cast<std::size_t>(cfg.ratio[c]);
  } else {
    for (int c = 0; c < 3; ++c) {
      const double want = static_cast<double>(cfg.train_pool) * cfg.ratio[c] /
                          static_cast<double>(ratio_sum);
      pool_take[c] = std::min(classes[c].size(),
                              static_cast<std::size_t>(std::llround(want)));
      if (cfg.ratio[c] > 0 && pool_take[c] == 0)
        fail(errc::insufficient_events, "requested pool leaves class " + std::to_string(c) +
                                            " empty");
    }
  }

  std::array<std::vector<std::size_t>, 3> pool;
  std::vector<char> in_pool(events.size(), 0);
  for (int c = 0; c < 3; ++c) {
    auto order = classes[c];
    Rng rng(cfg.seed, static_cast<std::uint64_t>(c));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);
    order.resize(pool_take[c]);
    for (std::size_t idx : order) in_pool[idx] = 1;
    pool[c] = std::move(order);
  }
  const std::size_t pool_total = pool[0].size() + pool[1].size() + pool[2].size();

  // Validation: round(vf * pool), allocated per class by largest remainder.
  const std::size_t v_total = std::min<std::size_t>(
      pool_total, static_cast<std::size_t>(std::llround(cfg.validation_fraction *
                                                        static_cast<double>(pool_total))));
  std::array<std::size_t, 3> v_take{};
  std::array<double, 3> frac{};
  std::size_t v_assigned = 0;
  for (int c = 0; c < 3; ++c) {
    const double exact = cfg.validation_fraction * static_cast<double>(pool[c].size());
    v_take[c] = static_cast<std::size_t>(exact);
    frac[c] = exact - static_cast<double>(v_take[c]);
    v_assigned += v_take[c];
  }
  while (v_assigned < v_total) {
    int best = -1;
    for (int c = 0; c < 3; ++c) {
      if (v_take[c] >= pool[c].size()) continue;
      if (best < 0 || frac[c] > frac[best]) best = c;
    }
    if (best < 0) break;
    ++v_take[best];
    frac[best] = -1.0;
    ++v_assigned;
  }
  while (v_assigned > v_total) {
    for (int c = 2; c >= 0 && v_assigned > v_total; --c)
      if (v_take[c] > 0) {
        --v_take[c];
        --v_assigned;
      }
  }

  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < pool[c].size(); ++i) {
      if (i < v_take[c])
        res.validation.push_back(pool[c][i]);
      else
        res.train.push_back(pool[c][i]);
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i)
    if (!in_pool[i]) res.test.push_back(i);

  std::sort(res.train.begin(), res.train.end());
  std::sort(res.validation.begin(), res.validation.end());
  std::sort(res.test.begin(), res.test.end());
  return res;
}

namespace {
nlohmann::ordered_json ids_of(const std::vector<std::size_t>& idx,
                              std::span<const StormEvent> events) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (std::size_t i : idx) a.push_back(events[i].event_id);
  return a;
}
}  // namespace

void save_split_json(const std::string& path, const SplitResult& split,
                     std::span<const StormEvent> events) {
  nlohmann::ordered_json doc = {{"train", ids_of(split.train, events)},
                                {"validation", ids_of(split.validation, events)},
                                {"test", ids_of(split.test, events)}};
  write_file_atomic(path, doc.dump(1));
}

SplitResult load_split_json(const std::string& path, std::span<const StormEvent> events) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_data, "invalid split file " + path + ": " + e.what());
  }
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < events.size(); ++i) index[events[i].event_id] = i;
  auto read = [&](const char* key) {
    std::vector<std::size_t> out;
    for (const auto& id : doc.value(key, nlohmann::json::array())) {
      const auto it = index.find(id.get<std::int64_t>());
      if (it == index.end())
        fail(errc::bad_data, path + ": unknown event id in '" + key + "'");
      out.push_back(it->second);
    }
    return out;
  };
  SplitResult res;
  res.train = read("train");
  res.validation = read("validation");
  res.test = read("test");
  return res;
}

}  // namespace floodgen

#include "floodgen/precip_features.hpp"

#include "floodgen/common.hpp"

namespace floodgen {

int heavy_indicator(double p_in, double threshold_in) {
  if (p_in < 0.0)
    fail(errc::negative_precipitation,
         "heavy_indicator: precipitation " + format_double(p_in) + " is negative");
  return p_in > threshold_in ? 1 : 0;
}

double heavy_ratio(const Mesh& mesh, std::span<const std::int32_t> cell_ids,
                   std::span<const double> values, double threshold_in) {
  if (cell_ids.empty()) fail(errc::empty_watershed, "heavy_ratio over empty cell set");
  double total = 0.0, heavy = 0.0;
  for (std::int32_t id : cell_ids) {
    const double a = mesh.cell(id).area_sqft;
    total += a;
    if (heavy_indicator(values[static_cast<std::size_t>(id)], threshold_in)) heavy += a;
  }
  return heavy / total;
}

std::vector<double> watershed_ratios(const Mesh& mesh, std::span<const double> values,
                                     double threshold_in) {
  if (values.size() != mesh.cell_count())
    fail(errc::length_mismatch, "value field length does not match mesh");
  std::vector<double> out(static_cast<std::size_t>(mesh.watershed_count()));
  for (std::int32_t w = 0; w < mesh.watershed_count(); ++w)
    out[static_cast<std::size_t>(w)] = heavy_ratio(mesh, mesh.watershed_cells(w), values, threshold_in);
  return out;
}

EventRatios event_ratios(const Mesh& mesh, const StormEvent& event, double threshold_in) {
  EventRatios r;
  r.hcpr = watershed_ratios(mesh, event.cumulative_in, threshold_in);
  r.hppr = watershed_ratios(mesh, event.peak_in, threshold_in);
  return r;
}

std::size_t cellwise_feature_count(const Mesh& mesh) {
  return 3 + 2 * static_cast<std::size_t>(mesh.watershed_count());
}

std::vector<std::string> cellwise_feature_names(const Mesh& mesh) {
  std::vector<std::string> names = {"cumulative_in", "peak_in", "duration_h"};
  for (std::int32_t w = 0; w < mesh.watershed_count(); ++w)
    names.push_back("hcpr_" + std::to_string(w));
  for (std::int32_t w = 0; w < mesh.watershed_count(); ++w)
    names.push_back("hppr_" + std::to_string(w));
  return names;
}

std::vector<std::string> universal_feature_names() {
  return {"cumulative_in", "peak_in", "duration_h", "channel", "elevation_ft"};
}

void cellwise_features(const Mesh& mesh, const StormEvent& event, const EventRatios& ratios,
                       std::int32_t cell_id, std::span<double> out) {
  const auto c = static_cast<std::size_t>(cell_id);
  const auto w = static_cast<std::size_t>(mesh.watershed_count());
  out[0] = event.cumulative_in[c];
  out[1] = event.peak_in[c];
  out[2] = event.duration_h;
  for (std::size_t i = 0; i < w; ++i) out[3 + i] = ratios.hcpr[i];
  for (std::size_t i = 0; i < w; ++i) out[3 + w + i] = ratios.hppr[i];
}

void universal_features(const Mesh& mesh, const StormEvent& event, std::int32_t cell_id,
                        std::span<double> out) {
  const auto c = static_cast<std::size_t>(cell_id);
  const Cell& cell = mesh.cell(cell_id);
  out[0] = event.cumulative_in[c];
  out[1] = event.peak_in[c];
  out[2] = event.duration_h;
  out[3] = cell.channel ? 1.0 : 0.0;
  out[4] = cell.elevation_ft;
}

}  // namespace floodgen

#include "floodgen/depth_estimator.hpp"

#include <chrono>
#include <cmath>

#include "floodgen/common.hpp"
#include "floodgen/parallel.hpp"
#include "floodgen/precip_features.hpp"

namespace floodgen {

namespace {

void require_depths(std::span<const StormEvent> events) {
  if (events.empty()) fail(errc::empty_training_set, "no training events");
  for (const StormEvent& ev : events)
    if (!ev.has_depth())
      fail(errc::missing_depths, "event " + std::to_string(ev.event_id) + " has no depths");
}

std::vector<EventRatios> all_ratios(const Mesh& mesh, std::span<const StormEvent> events) {
  std::vector<EventRatios> out(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) out[e] = event_ratios(mesh, events[e]);
  return out;
}

}  // namespace

CellwiseEstimator train_cellwise(const Mesh& mesh, std::span<const StormEvent> events,
                                 const GbtConfig& cfg, int workers) {
  require_depths(events);
  validate(cfg);
  const auto ratios = all_ratios(mesh, events);
  const std::size_t n_feat = cellwise_feature_count(mesh);

  CellwiseEstimator est;
  est.feature_names = cellwise_feature_names(mesh);
  est.mesh_fingerprint = mesh.fingerprint();
  est.models.resize(mesh.cell_count());

  parallel_for(mesh.cell_count(), workers, [&](std::size_t c) {
    FeatureMatrix X;
    X.reserve_rows(events.size(), n_feat);
    std::vector<double> y(events.size());
    std::vector<double> row(n_feat);
    for (std::size_t e = 0; e < events.size(); ++e) {
      cellwise_features(mesh, events[e], ratios[e], static_cast<std::int32_t>(c), row);
      X.push_row(row);
      y[e] = events[e].depth_ft[c];
    }
    try {
      est.models[c] = fit_gbt(X, y, cfg);
    } catch (const Error& e) {
      fail(e.code(), "cell " + std::to_string(c) + ": " + e.what());
    }
  });
  return est;
}

UniversalEstimator train_universal(const Mesh& mesh, std::span<const StormEvent> events,
                                   const GbtConfig& cfg) {
  require_depths(events);
  validate(cfg);
  const std::size_t n_cells = mesh.cell_count();

  FeatureMatrix X;
  X.reserve_rows(events.size() * n_cells, kUniversalFeatureCount);
  std::vector<double> y;
  y.reserve(events.size() * n_cells);
  std::vector<double> row(kUniversalFeatureCount);
  for (const StormEvent& ev : events)
    for (std::size_t c = 0; c < n_cells; ++c) {
      universal_features(mesh, ev, static_cast<std::int32_t>(c), row);
      X.push_row(row);
      y.push_back(ev.depth_ft[c]);
    }

  UniversalEstimator est;
  est.feature_names = universal_feature_names();
  est.mesh_fingerprint = mesh.fingerprint();
  est.model = fit_gbt(X, y, cfg);
  return est;
}

EvalReport evaluate(const Mesh& mesh, std::span<const std::int32_t> cell_ids,
                    std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size() || predictions.size() != cell_ids.size())
    fail(errc::length_mismatch, "predictions, truths, and cell ids must align");
  if (predictions.empty()) fail(errc::empty_dataset, "nothing to evaluate");

  const auto stats_for = [&](int want_channel) {
    PartitionStats s;
    double sse = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const bool ch = mesh.cell(cell_ids[i]).channel;
      if (want_channel >= 0 && ch != (want_channel == 1)) continue;
      const double d = predictions[i] - truths[i];
      sse += d * d;
      sum += truths[i];
      ++s.count;
    }
    if (s.count == 0) return s;
    s.rmse = std::sqrt(sse / static_cast<double>(s.count));
    const double mean = sum / static_cast<double>(s.count);
    double sst = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const bool ch = mesh.cell(cell_ids[i]).channel;
      if (want_channel >= 0 && ch != (want_channel == 1)) continue;
      sst += (truths[i] - mean) * (truths[i] - mean);
    }
    if (sst > 0.0) s.r2 = 1.0 - sse / sst;
    return s;
  };

  EvalReport rep;
  rep.overall = stats_for(-1);
  rep.channel = stats_for(1);
  rep.non_channel = stats_for(0);
  return rep;
}

namespace {

template <class PredictFn>
EvalReport evaluate_events(const Mesh& mesh, std::span<const StormEvent> events,
                           int workers, PredictFn&& predict_event) {
  require_depths(events);
  const std::size_t n_cells = mesh.cell_count();
  std::vector<double> preds(events.size() * n_cells);
  std::vector<double> truths(events.size() * n_cells);
  std::vector<std::int32_t> cells(events.size() * n_cells);

  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(events.size(), workers, [&](std::size_t e) {
    predict_event(events[e], std::span<double>(preds.data() + e * n_cells, n_cells));
  });
  const auto t1 = std::chrono::steady_clock::now();

  for (std::size_t e = 0; e < events.size(); ++e)
    for (std::size_t c = 0; c < n_cells; ++c) {
      truths[e * n_cells + c] = events[e].depth_ft[c];
      cells[e * n_cells + c] = static_cast<std::int32_t>(c);
    }
  EvalReport rep = evaluate(mesh, cells, preds, truths);
  rep.predict_seconds = std::chrono::duration<double>(t1 - t0).count();
  return rep;
}

}  // namespace

EvalReport evaluate_cellwise(const Mesh& mesh, const CellwiseEstimator& est,
                             std::span<const StormEvent> events, int workers) {
  if (est.models.size() != mesh.cell_count())
    fail(errc::mesh_fingerprint_mismatch, "estimator was built for a different mesh");
  const std::size_t n_feat = cellwise_feature_count(mesh);
  return evaluate_events(mesh, events, workers,
                         [&](const StormEvent& ev, std::span<double> out) {
                           const EventRatios r = event_ratios(mesh, ev);
                           std::vector<double> row(n_feat);
                           for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
                             cellwise_features(mesh, ev, r, static_cast<std::int32_t>(c), row);
                             out[c] = est.models[c].predict(row);
                           }
                         });
}

EvalReport evaluate_universal(const Mesh& mesh, const UniversalEstimator& est,
                              std::span<const StormEvent> events, int workers) {
  return evaluate_events(mesh, events, workers,
                         [&](const StormEvent& ev, std::span<double> out) {
                           std::vector<double> row(kUniversalFeatureCount);
                           for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
                             universal_features(mesh, ev, static_cast<std::int32_t>(c), row);
                             out[c] = est.model.predict(row);
                           }
                         });
}

}  // namespace floodgen

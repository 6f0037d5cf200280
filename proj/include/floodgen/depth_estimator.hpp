#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floodgen/gbt.hpp"
#include "floodgen/mesh.hpp"

namespace floodgen {

struct CellwiseEstimator {
  std::vector<GbtModel> models;  // indexed by cell_id
  std::vector<std::string> feature_names;
  std::string mesh_fingerprint;
};

struct UniversalEstimator {
  GbtModel model;
  std::vector<std::string> feature_names;
  std::string mesh_fingerprint;
};

struct PartitionStats {
  std::size_t count = 0;
  double rmse = 0.0;
  std::optional<double> r2;  // empty when the partition's truths are constant
};

struct EvalReport {
  PartitionStats overall, channel, non_channel;
  double predict_seconds = 0.0;
};

CellwiseEstimator train_cellwise(const Mesh& mesh, std::span<const StormEvent> events,
                                 const GbtConfig& cfg, int workers = 0);
UniversalEstimator train_universal(const Mesh& mesh, std::span<const StormEvent> events,
                                   const GbtConfig& cfg);

// Stats over (event, cell) aligned prediction/truth pairs; `cell_ids` names the
// cell behind each pair so channel and non-channel partitions can be separated.
EvalReport evaluate(const Mesh& mesh, std::span<const std::int32_t> cell_ids,
                    std::span<const double> predictions, std::span<const double> truths);

EvalReport evaluate_cellwise(const Mesh& mesh, const CellwiseEstimator& est,
                             std::span<const StormEvent> events, int workers = 0);
EvalReport evaluate_universal(const Mesh& mesh, const UniversalEstimator& est,
                              std::span<const StormEvent> events, int workers = 0);

}  // namespace floodgen

#pragma once

#include <string>

#include "floodgen/depth_estimator.hpp"
#include "floodgen/gbt.hpp"
#include "floodgen/mesh.hpp"

namespace floodgen {

// A store is a directory holding manifest.json plus one tree file per model.
// The manifest pins mode, feature ordering, mesh fingerprint, training config,
// and a content digest for every tree file.
void save_cellwise_store(const std::string& dir, const CellwiseEstimator& est,
                         const GbtConfig& cfg);
void save_universal_store(const std::string& dir, const UniversalEstimator& est,
                          const GbtConfig& cfg);

CellwiseEstimator load_cellwise_store(const std::string& dir, const Mesh& mesh);
UniversalEstimator load_universal_store(const std::string& dir, const Mesh& mesh);

}  // namespace floodgen

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace floodgen {

struct GbtConfig {
  int n_trees = 1000;
  int max_depth = 5;
  double learning_rate = 0.01;
  double subsample = 0.3;
  double l1_alpha = 0.1;
  double l2_lambda = 1.0;
  int min_leaf = 1;
  std::uint64_t seed = 0;
};

void validate(const GbtConfig& cfg);

struct GbtNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  double value = 0.0;         // leaf weight, unscaled by learning rate
  std::int32_t left = -1;
  std::int32_t right = -1;
};

struct GbtTree {
  std::vector<GbtNode> nodes;  // nodes[0] is the root
  double leaf_value(std::span<const double> row) const;
};

struct GbtModel {
  double base_score = 0.0;
  double learning_rate = 0.0;
  std::size_t n_features = 0;
  std::vector<GbtTree> trees;

  // Raw boosted score, no clamp.
  double score(std::span<const double> row) const;
  // score clamped at >= 0 (depths are physical).
  double predict(std::span<const double> row) const;

  std::string serialize() const;
  static GbtModel deserialize(const std::string& text);
};

// Row-major feature matrix; all rows share one length.
struct FeatureMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> data;

  void reserve_rows(std::size_t rows, std::size_t cols);
  void push_row(std::span<const double> row);
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * n_cols, n_cols};
  }
  double at(std::size_t r, std::size_t c) const { return data[r * n_cols + c]; }
};

GbtModel fit_gbt(const FeatureMatrix& rows, std::span<const double> targets,
                 const GbtConfig& cfg);

}  // namespace floodgen

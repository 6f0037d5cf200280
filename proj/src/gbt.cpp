#include "floodgen/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "floodgen/common.hpp"
#include "floodgen/rng.hpp"

namespace floodgen {

void validate(const GbtConfig& cfg) {
  if (cfg.n_trees < 1) fail(errc::bad_config, "n_trees must be >= 1");
  if (cfg.max_depth < 1) fail(errc::bad_config, "max_depth must be >= 1");
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0))
    fail(errc::bad_config, "learning_rate must lie in (0, 1]");
  if (!(cfg.subsample > 0.0 && cfg.subsample <= 1.0))
    fail(errc::bad_config, "subsample must lie in (0, 1]");
  if (cfg.l1_alpha < 0.0) fail(errc::bad_config, "l1_alpha must be >= 0");
  if (cfg.l2_lambda < 0.0) fail(errc::bad_config, "l2_lambda must be >= 0");
  if (cfg.min_leaf < 1) fail(errc::bad_config, "min_leaf must be >= 1");
}

void FeatureMatrix::reserve_rows(std::size_t rows, std::size_t cols) {
  n_cols = cols;
  data.reserve(rows * cols);
}

void FeatureMatrix::push_row(std::span<const double> row) {
  if (n_cols == 0 && n_rows == 0) n_cols = row.size();
  if (row.size() != n_cols)
    fail(errc::inconsistent_feature_length,
         "row has " + std::to_string(row.size()) + " features, expected " +
             std::to_string(n_cols));
  data.insert(data.end(), row.begin(), row.end());
  ++n_rows;
}

double GbtTree::leaf_value(std::span<const double> row) const {
  std::int32_t i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const GbtNode& n = nodes[static_cast<std::size_t>(i)];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

double GbtModel::score(std::span<const double> row) const {
  if (row.size() != n_features)
    fail(errc::feature_length_mismatch, "row has " + std::to_string(row.size()) +
                                            " features, model expects " +
                                            std::to_string(n_features));
  double s = base_score;
  for (const GbtTree& t : trees) s += learning_rate * t.leaf_value(row);
  return s;
}

double GbtModel::predict(std::span<const double> row) const {
  return std::max(0.0, score(row));
}

namespace {

struct FitState {
  const FeatureMatrix* X;
  std::span<const double> residual;
  double l1_alpha, l2_lambda;
  int min_leaf;
};

double leaf_weight(double residual_sum, std::size_t n, double l1, double l2) {
  const double soft = std::max(std::fabs(residual_sum) - l1, 0.0);
  if (soft == 0.0) return 0.0;
  const double w = soft / (static_cast<double>(n) + l2);
  return residual_sum < 0.0 ? -w : w;
}

// Grows one node over `rows` (indices into X), appending children recursively.
// Returns the node index.
std::int32_t grow(const FitState& st, std::vector<GbtNode>& nodes,
                  std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi,
                  int depth_left) {
  const std::size_t n = hi - lo;
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) sum += st.residual[rows[i]];

  const auto make_leaf = [&]() {
    GbtNode leaf;
    leaf.value = leaf_weight(sum, n, st.l1_alpha, st.l2_lambda);
    nodes.push_back(leaf);
    return static_cast<std::int32_t>(nodes.size() - 1);
  };
  if (depth_left == 0 || n < 2 * static_cast<std::size_t>(st.min_leaf)) return make_leaf();

  const double parent = sum * sum / static_cast<double>(n);
  const std::size_t n_feat = st.X->n_cols;
  int best_feature = -1;
  double best_gain = 0.0, best_threshold = 0.0;

  std::vector<std::pair<double, double>> vals(n);  // (feature value, residual)
  for (std::size_t f = 0; f < n_feat; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = rows[lo + i];
      vals[i] = {st.X->at(r, f), st.residual[r]};
    }
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += vals[i].second;
      if (vals[i].first == vals[i + 1].first) continue;  // split only between distinct values
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < static_cast<std::size_t>(st.min_leaf) ||
          nr < static_cast<std::size_t>(st.min_leaf))
        continue;
      const double right_sum = sum - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) - parent;
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
        best_threshold = vals[i].first;  // left branch takes x <= this value
      }
    }
  }
  if (best_feature < 0) return make_leaf();

  const auto mid_it = std::partition(
      rows.begin() + static_cast<std::ptrdiff_t>(lo),
      rows.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t r) {
        return st.X->at(r, static_cast<std::size_t>(best_feature)) <= best_threshold;
      });
  const std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());

  GbtNode split;
  split.feature = best_feature;
  split.threshold = best_threshold;
  nodes.push_back(split);
  const std::int32_t self = static_cast<std::int32_t>(nodes.size() - 1);
  const std::int32_t left = grow(st, nodes, rows, lo, mid, depth_left - 1);
  const std::int32_t right = grow(st, nodes, rows, mid, hi, depth_left - 1);
  nodes[static_cast<std::size_t>(self)].left = left;
  nodes[static_cast<std::size_t>(self)].right = right;
  return self;
}

}  // namespace

GbtModel fit_gbt(const FeatureMatrix& X, std::span<const double> y, const GbtConfig& cfg) {
  validate(cfg);
  if (X.n_rows == 0) fail(errc::empty_training_set, "no training rows");
  if (y.size() != X.n_rows)
    fail(errc::length_mismatch, "target count does not match row count");

  const std::size_t n = X.n_rows;

  // Canonical row order (lexicographic by features, then target) so that the
  // fitted model does not depend on how callers ordered their rows.
  std::vector<std::size_t> canon(n);
  std::iota(canon.begin(), canon.end(), 0);
  std::sort(canon.begin(), canon.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = X.row(a), rb = X.row(b);
    for (std::size_t c = 0; c < X.n_cols; ++c) {
      if (ra[c] != rb[c]) return ra[c] < rb[c];
    }
    return y[a] < y[b];
  });

  GbtModel model;
  model.learning_rate = cfg.learning_rate;
  model.n_features = X.n_cols;
  double target_sum = 0.0;  // accumulate in canonical order so the mean is too
  for (std::size_t i : canon) target_sum += y[i];
  model.base_score = target_sum / static_cast<double>(n);
  model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - model.base_score;

  std::size_t n_sub = n;
  if (cfg.subsample < 1.0) {
    n_sub = static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n)));
    n_sub = std::clamp<std::size_t>(n_sub, 1, n);
  }

  FitState st{&X, residual, cfg.l1_alpha, cfg.l2_lambda, cfg.min_leaf};
  std::vector<std::size_t> rows;
  for (int t = 0; t < cfg.n_trees; ++t) {
    rows = canon;
    if (n_sub < n) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(t));
      for (std::size_t i = 0; i < n_sub; ++i)
        std::swap(rows[i], rows[i + rng.next_below(n - i)]);
      rows.resize(n_sub);
    }
    GbtTree tree;
    grow(st, tree.nodes, rows, 0, rows.size(), cfg.max_depth);
    for (std::size_t i = 0; i < n; ++i)
      residual[i] -= cfg.learning_rate * tree.leaf_value(X.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Text serialization; hexfloat keeps round trips exact.

namespace {
std::string hexd(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}
}  // namespace

std::string GbtModel::serialize() const {
  std::ostringstream out;
  out << "gbt 1\n";
  out << "base " << hexd(base_score) << "\n";
  out << "learning_rate " << hexd(learning_rate) << "\n";
  out << "n_features " << n_features << "\n";
  out << "n_trees " << trees.size() << "\n";
  for (const GbtTree& t : trees) {
    out << "tree " << t.nodes.size() << "\n";
    for (const GbtNode& nd : t.nodes)
      out << nd.feature << ' ' << hexd(nd.threshold) << ' ' << hexd(nd.value) << ' '
          << nd.left << ' ' << nd.right << "\n";
  }
  return out.str();
}

GbtModel GbtModel::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "gbt" || version != 1)
    fail(errc::corrupt_store, "unrecognized model header");
  GbtModel m;
  std::size_t n_trees = 0;
  auto expect = [&](const char* key) {
    if (!(in >> tag) || tag != key)
      fail(errc::corrupt_store, std::string("expected '") + key + "' in model file");
  };
  auto read_double = [&]() {
    if (!(in >> tag)) fail(errc::corrupt_store, "truncated model file");
    char* end = nullptr;
    const double v = std::strtod(tag.c_str(), &end);
    if (end == tag.c_str() || *end != '\0')
      fail(errc::corrupt_store, "bad numeric literal in model file");
    return v;
  };
  expect("base");
  m.base_score = read_double();
  expect("learning_rate");
  m.learning_rate = read_double();
  expect("n_features");
  if (!(in >> m.n_features)) fail(errc::corrupt_store, "truncated model file");
  expect("n_trees");
  if (!(in >> n_trees)) fail(errc::corrupt_store, "truncated model file");
  m.trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    expect("tree");
    std::size_t count = 0;
    if (!(in >> count) || count == 0) fail(errc::corrupt_store, "bad tree node count");
    GbtTree tree;
    tree.nodes.resize(count);
    for (GbtNode& nd : tree.nodes) {
      if (!(in >> nd.feature)) fail(errc::corrupt_store, "truncated tree");
      nd.threshold = read_double();
      nd.value = read_double();
      if (!(in >> nd.left >> nd.right)) fail(errc::corrupt_store, "truncated tree");
      const auto limit = static_cast<std::int32_t>(count);
      if (nd.feature >= static_cast<std::int32_t>(m.n_features) || nd.left >= limit ||
          nd.right >= limit)
        fail(errc::corrupt_store, "tree node references out of range");
      if (nd.feature >= 0 && (nd.left < 0 || nd.right < 0))
        fail(errc::corrupt_store, "split node missing a child");
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace floodgen

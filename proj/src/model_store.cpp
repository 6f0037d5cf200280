#include "floodgen/model_store.hpp"

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "floodgen/common.hpp"

namespace fs = std::filesystem;

namespace floodgen {

namespace {

constexpr int kFormatVersion = 1;

std::string tree_file_name(std::size_t cell) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cell_%06zu.tree", cell);
  return buf;
}

nlohmann::ordered_json config_json(const GbtConfig& cfg) {
  return {{"n_trees", cfg.n_trees},       {"max_depth", cfg.max_depth},
          {"learning_rate", cfg.learning_rate}, {"subsample", cfg.subsample},
          {"l1_alpha", cfg.l1_alpha},     {"l2_lambda", cfg.l2_lambda},
          {"min_leaf", cfg.min_leaf},     {"seed", cfg.seed}};
}

void write_store(const std::string& dir, const std::string& mode,
                 const std::vector<std::string>& names,
                 const std::string& fingerprint, const GbtConfig& cfg,
                 const std::vector<const GbtModel*>& models) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(errc::io_failure, "cannot create " + dir + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["mode"] = mode;
  manifest["mesh_fingerprint"] = fingerprint;
  manifest["n_models"] = models.size();
  manifest["feature_names"] = names;
  manifest["config"] = config_json(cfg);
  manifest["files"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string name = mode == "universal" ? "model.tree" : tree_file_name(i);
    const std::string body = models[i]->serialize();
    write_file_atomic((fs::path(dir) / name).string(), body);
    manifest["files"].push_back(
        {{"name", name}, {"digest", to_hex64(fnv1a64(body.data(), body.size()))}});
  }
  write_file_atomic((fs::path(dir) / "manifest.json").string(), manifest.dump(1));
}

struct LoadedManifest {
  std::string mode;
  std::string fingerprint;
  std::vector<std::string> feature_names;
  std::vector<std::pair<std::string, std::string>> files;  // (name, digest)
};

LoadedManifest read_manifest(const std::string& dir, const std::string& want_mode) {
  const std::string path = (fs::path(dir) / "manifest.json").string();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_store, "unreadable manifest " + path + ": " + e.what());
  }
  LoadedManifest m;
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion)
      fail(errc::corrupt_store, path + ": unsupported format version");
    m.mode = doc.at("mode").get<std::string>();
    m.fingerprint = doc.at("mesh_fingerprint").get<std::string>();
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto n = doc.at("n_models").get<std::size_t>();
    for (const auto& f : doc.at("files"))
      m.files.emplace_back(f.at("name").get<std::string>(),
                           f.at("digest").get<std::string>());
    if (m.files.size() != n)
      fail(errc::corrupt_store, path + ": file list does not match n_models");
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_store, "malformed manifest " + path + ": " + e.what());
  }
  if (m.mode != want_mode)
    fail(errc::corrupt_store, path + ": store mode is '" + m.mode + "', expected '" +
                                  want_mode + "'");
  return m;
}

GbtModel load_tree_file(const std::string& dir, const std::string& name,
                        const std::string& digest) {
  const std::string body = read_file((fs::path(dir) / name).string());
  if (to_hex64(fnv1a64(body.data(), body.size())) != digest)
    fail(errc::corrupt_store, name + ": content digest mismatch");
  return GbtModel::deserialize(body);
}

}  // namespace

void save_cellwise_store(const std::string& dir, const CellwiseEstimator& est,
                         const GbtConfig& cfg) {
  std::vector<const GbtModel*> models;
  models.reserve(est.models.size());
  for (const GbtModel& m : est.models) models.push_back(&m);
  write_store(dir, "cellwise", est.feature_names, est.mesh_fingerprint, cfg, models);
}

void save_universal_store(const std::string& dir, const UniversalEstimator& est,
                          const GbtConfig& cfg) {
  write_store(dir, "universal", est.feature_names, est.mesh_fingerprint, cfg,
              {&est.model});
}

CellwiseEstimator load_cellwise_store(const std::string& dir, const Mesh& mesh) {
  const LoadedManifest m = read_manifest(dir, "cellwise");
  if (m.fingerprint != mesh.fingerprint())
    fail(errc::mesh_fingerprint_mismatch,
         dir + ": store was trained on a different mesh");
  if (m.files.size() != mesh.cell_count())
    fail(errc::corrupt_store, dir + ": model count does not match mesh cell count");
  CellwiseEstimator est;
  est.feature_names = m.feature_names;
  est.mesh_fingerprint = m.fingerprint;
  est.models.reserve(m.files.size());
  for (const auto& [name, digest] : m.files)
    est.models.push_back(load_tree_file(dir, name, digest));
  return est;
}

UniversalEstimator load_universal_store(const std::string& dir, const Mesh& mesh) {
  const LoadedManifest m = read_manifest(dir, "universal");
  if (m.fingerprint != mesh.fingerprint())
    fail(errc::mesh_fingerprint_mismatch,
         dir + ": store was trained on a different mesh");
  if (m.files.size() != 1)
    fail(errc::corrupt_store, dir + ": universal store must hold exactly one model");
  UniversalEstimator est;
  est.feature_names = m.feature_names;
  est.mesh_fingerprint = m.fingerprint;
  est.model = load_tree_file(dir, m.files[0].first, m.files[0].second);
  return est;
}

}  // namespace floodgen

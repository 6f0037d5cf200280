#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "floodgen/common.hpp"
#include "floodgen/model_store.hpp"
#include "helpers.hpp"

using namespace floodgen;
using testing::code;
using testing::thrown_code;

namespace {

std::filesystem::path temp_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

GbtConfig small_config() {
  GbtConfig cfg;
  cfg.n_trees = 8;
  cfg.max_depth = 2;
  cfg.seed = 4242;
  return cfg;
}

struct StoreFixture {
  Mesh mesh = testing::grid_mesh(2, 2);
  std::vector<StormEvent> events = testing::linear_events(mesh, 20, 71);
  GbtConfig cfg = small_config();
  CellwiseEstimator cellwise = train_cellwise(mesh, events, cfg);
  UniversalEstimator universal = train_universal(mesh, events, cfg);
};

void corrupt_byte(const std::filesystem::path& path) {
  std::string body = read_file(path.string());
  body[body.size() / 2] ^= 0x20;
  write_file_atomic(path.string(), body);
}

}  // namespace

TEST_CASE("cellwise stores round-trip bitwise") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_cellwise");
  save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);

  CHECK(std::filesystem::exists(dir / "manifest.json"));
  for (int c = 0; c < 4; ++c) {
    char name[32];
    std::snprintf(name, sizeof(name), "cell_%06d.tree", c);
    CHECK(std::filesystem::exists(dir / name));
  }

  const CellwiseEstimator loaded = load_cellwise_store(dir.string(), fx.mesh);
  CHECK(loaded.feature_names == fx.cellwise.feature_names);
  CHECK(loaded.mesh_fingerprint == fx.cellwise.mesh_fingerprint);
  REQUIRE(loaded.models.size() == fx.cellwise.models.size());
  for (std::size_t c = 0; c < loaded.models.size(); ++c)
    CHECK(loaded.models[c].serialize() == fx.cellwise.models[c].serialize());
  std::filesystem::remove_all(dir);
}

TEST_CASE("universal stores round-trip bitwise") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_universal");
  save_universal_store(dir.string(), fx.universal, fx.cfg);
  CHECK(std::filesystem::exists(dir / "model.tree"));

  const UniversalEstimator loaded = load_universal_store(dir.string(), fx.mesh);
  CHECK(loaded.feature_names == fx.universal.feature_names);
  CHECK(loaded.mesh_fingerprint == fx.universal.mesh_fingerprint);
  CHECK(loaded.model.serialize() == fx.universal.model.serialize());
  std::filesystem::remove_all(dir);
}

TEST_CASE("the manifest pins config, mode, and per-file digests") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_manifest");
  save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);

  const auto doc = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
  CHECK(doc.at("format_version").get<int>() == 1);
  CHECK(doc.at("mode").get<std::string>() == "cellwise");
  CHECK(doc.at("mesh_fingerprint").get<std::string>() == fx.mesh.fingerprint());
  CHECK(doc.at("n_models").get<std::size_t>() == 4);
  CHECK(doc.at("feature_names").get<std::vector<std::string>>() ==
        fx.cellwise.feature_names);
  CHECK(doc.at("config").at("n_trees").get<int>() == fx.cfg.n_trees);
  CHECK(doc.at("config").at("seed").get<std::uint64_t>() == fx.cfg.seed);

  for (const auto& f : doc.at("files")) {
    const std::string body = read_file((dir / f.at("name").get<std::string>()).string());
    CHECK(f.at("digest").get<std::string>() == to_hex64(fnv1a64(body.data(), body.size())));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("tampered tree files are rejected") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_tampered");
  save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);
  corrupt_byte(dir / "cell_000001.tree");
  CHECK(thrown_code([&] { (void)load_cellwise_store(dir.string(), fx.mesh); }) ==
        code(errc::corrupt_store));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a store only loads onto the mesh it was trained on") {
  const StoreFixture fx;
  const Mesh other = testing::grid_mesh(3, 3);
  const auto dir = temp_dir("store_mesh");
  save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);
  CHECK(thrown_code([&] { (void)load_cellwise_store(dir.string(), other); }) ==
        code(errc::mesh_fingerprint_mismatch));
  std::filesystem::remove_all(dir);

  save_universal_store(dir.string(), fx.universal, fx.cfg);
  CHECK(thrown_code([&] { (void)load_universal_store(dir.string(), other); }) ==
        code(errc::mesh_fingerprint_mismatch));
  std::filesystem::remove_all(dir);
}

TEST_CASE("mode mismatches between stores are rejected") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_mode");
  save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);
  CHECK(thrown_code([&] { (void)load_universal_store(dir.string(), fx.mesh); }) ==
        code(errc::corrupt_store));
  std::filesystem::remove_all(dir);

  save_universal_store(dir.string(), fx.universal, fx.cfg);
  CHECK(thrown_code([&] { (void)load_cellwise_store(dir.string(), fx.mesh); }) ==
        code(errc::corrupt_store));
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest edits that break invariants are rejected") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_edits");
  const auto manifest = dir / "manifest.json";

  auto reload_with = [&](auto mutate) {
    std::filesystem::remove_all(dir);
    save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);
    auto doc = nlohmann::json::parse(read_file(manifest.string()));
    mutate(doc);
    write_file_atomic(manifest.string(), doc.dump(1));
    return thrown_code([&] { (void)load_cellwise_store(dir.string(), fx.mesh); });
  };

  CHECK(reload_with([](nlohmann::json& d) { d["n_models"] = 3; }) ==
        code(errc::corrupt_store));
  CHECK(reload_with([](nlohmann::json& d) { d["format_version"] = 2; }) ==
        code(errc::corrupt_store));
  CHECK(reload_with([](nlohmann::json& d) { d.erase("mode"); }) ==
        code(errc::corrupt_store));
  // dropping a tree file from the listing shrinks the model count below the mesh
  CHECK(reload_with([](nlohmann::json& d) {
          d["files"].erase(0);
          d["n_models"] = 3;
        }) == code(errc::corrupt_store));
  std::filesystem::remove_all(dir);
}

TEST_CASE("unreadable stores report what is missing") {
  const StoreFixture fx;
  const auto dir = temp_dir("store_broken");

  CHECK(thrown_code([&] { (void)load_cellwise_store(dir.string(), fx.mesh); }) ==
        code(errc::io_failure));  // no directory at all

  std::filesystem::create_directories(dir);
  write_file_atomic((dir / "manifest.json").string(), "{broken");
  CHECK(thrown_code([&] { (void)load_cellwise_store(dir.string(), fx.mesh); }) ==
        code(errc::corrupt_store));

  std::filesystem::remove_all(dir);
  save_cellwise_store(dir.string(), fx.cellwise, fx.cfg);
  std::filesystem::remove(dir / "cell_000002.tree");
  CHECK(thrown_code([&] { (void)load_cellwise_store(dir.string(), fx.mesh); }) ==
        code(errc::io_failure));
  std::filesystem::remove_all(dir);
}

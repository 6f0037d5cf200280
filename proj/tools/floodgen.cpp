#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "floodgen/bench.hpp"
#include "floodgen/common.hpp"
#include "floodgen/depth_estimator.hpp"
#include "floodgen/distribution_metrics.hpp"
#include "floodgen/event_synth.hpp"
#include "floodgen/mesh.hpp"
#include "floodgen/model_store.hpp"
#include "floodgen/parallel.hpp"
#include "floodgen/point_generator.hpp"
#include "floodgen/pools.hpp"
#include "floodgen/probmap.hpp"

namespace fs = std::filesystem;
using namespace floodgen;

namespace {

struct CommonOpts {
  std::string mesh_path;
  std::string events_path;
  int workers = 0;
};

Mesh load_mesh(const CommonOpts& c) { return Mesh::load_geojson(c.mesh_path); }

std::vector<StormEvent> load_events(const CommonOpts& c, const Mesh& mesh) {
  return load_events_csv(c.events_path, mesh);
}

void add_common(CLI::App* cmd, CommonOpts& c, bool events = true) {
  cmd->add_option("--mesh", c.mesh_path, "study-area mesh GeoJSON")->required();
  if (events)
    cmd->add_option("--events", c.events_path, "precipitation-flood events CSV")
        ->required();
  cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)");
}

struct SplitOpts {
  SplitConfig cfg;
  std::string ratio = "2:4:1";
  std::string path;  // split JSON (output or input)
};

void add_split(CLI::App* cmd, SplitOpts& s) {
  cmd->add_option("--split-ratio", s.ratio, "train-pool class ratio a:b:c");
  cmd->add_option("--validation-fraction", s.cfg.validation_fraction,
                  "share of the pool held out for validation");
  cmd->add_option("--train-pool", s.cfg.train_pool,
                  "total pool size (0 = largest the ratio allows)");
  cmd->add_option("--split-seed", s.cfg.seed, "split shuffle seed");
}

SplitConfig parse_split(const SplitOpts& s) {
  SplitConfig cfg = s.cfg;
  if (std::sscanf(s.ratio.c_str(), "%d:%d:%d", &cfg.ratio[0], &cfg.ratio[1],
                  &cfg.ratio[2]) != 3)
    fail(errc::bad_config, "split ratio must look like 2:4:1");
  return cfg;
}

void add_gbt(CLI::App* cmd, GbtConfig& g) {
  cmd->add_option("--trees", g.n_trees, "boosting rounds");
  cmd->add_option("--depth", g.max_depth, "maximum tree depth");
  cmd->add_option("--learning-rate", g.learning_rate, "shrinkage per round");
  cmd->add_option("--subsample", g.subsample, "row fraction per tree (0,1]");
  cmd->add_option("--l1-alpha", g.l1_alpha, "L1 leaf regularization");
  cmd->add_option("--l2-lambda", g.l2_lambda, "L2 leaf regularization");
  cmd->add_option("--min-leaf", g.min_leaf, "minimum rows per leaf");
  cmd->add_option("--train-seed", g.seed, "row-subsample seed");
}

void add_knn(CLI::App* cmd, KnnRule& k) {
  cmd->add_option("--knn-slope", k.slope, "K per hour of duration");
  cmd->add_option("--knn-min", k.k_min, "lower clamp on K");
  cmd->add_option("--knn-max", k.k_max, "upper clamp on K");
}

nlohmann::ordered_json report_json(const EvalReport& rep) {
  const auto part = [](const PartitionStats& p) {
    nlohmann::ordered_json j = {{"count", p.count}, {"rmse", p.rmse}};
    if (p.r2)
      j["r2"] = *p.r2;
    else
      j["r2"] = nullptr;
    return j;
  };
  return {{"overall", part(rep.overall)},
          {"channel", part(rep.channel)},
          {"non_channel", part(rep.non_channel)},
          {"predict_seconds", rep.predict_seconds}};
}

std::vector<StormEvent> select_events(const std::vector<StormEvent>& all,
                                      const std::vector<std::size_t>& idx) {
  std::vector<StormEvent> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

// Reads every event CSV named by a batch manifest into per-event depth rows.
std::vector<std::vector<double>> batch_depths(const std::string& manifest_path,
                                              const Mesh& mesh) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_data, "invalid batch manifest " + manifest_path + ": " + e.what());
  }
  if (doc.value("mesh_fingerprint", "") != mesh.fingerprint())
    fail(errc::mesh_fingerprint_mismatch,
         manifest_path + ": batch was generated on a different mesh");
  const fs::path dir = fs::path(manifest_path).parent_path();
  std::vector<std::vector<double>> depths;
  for (const auto& je : doc.at("events")) {
    const std::string file = je.at("file").get<std::string>();
    depths.push_back(load_synthetic_depths_csv((dir / file).string(), mesh.cell_count()));
  }
  if (depths.empty()) fail(errc::empty_batch, manifest_path + ": no events listed");
  return depths;
}

int cmd_ingest(const CommonOpts& common, const std::string& out_dir) {
  const Mesh mesh = load_mesh(common);
  const auto events = load_events(common, mesh);
  fs::create_directories(out_dir);
  mesh.save_geojson((fs::path(out_dir) / "mesh.geojson").string());
  save_events_csv((fs::path(out_dir) / "events.csv").string(), events);
  std::size_t with_depth = 0;
  for (const auto& ev : events)
    if (ev.has_depth()) ++with_depth;
  nlohmann::ordered_json summary = {{"cells", mesh.cell_count()},
                                    {"watersheds", mesh.watershed_count()},
                                    {"events", events.size()},
                                    {"events_with_depth", with_depth},
                                    {"mesh_fingerprint", mesh.fingerprint()}};
  write_file_atomic((fs::path(out_dir) / "summary.json").string(), summary.dump(1));
  std::cout << summary.dump(1) << "\n";
  return 0;
}

int cmd_split(const CommonOpts& common, const SplitOpts& sopts) {
  const Mesh mesh = load_mesh(common);
  const auto events = load_events(common, mesh);
  const SplitResult split = stratified_split(events, parse_split(sopts));
  save_split_json(sopts.path, split, events);
  std::cout << "train " << split.train.size() << ", validation "
            << split.validation.size() << ", test " << split.test.size()
            << " (classes " << split.class_counts[0] << "/" << split.class_counts[1]
            << "/" << split.class_counts[2] << ")\n";
  return 0;
}

int cmd_train_estimator(const CommonOpts& common, const SplitOpts& sopts,
                        const GbtConfig& base, const std::string& store_dir,
                        const std::vector<std::string>& grid) {
  const Mesh mesh = load_mesh(common);
  const auto events = load_events(common, mesh);
  SplitResult split;
  if (!sopts.path.empty() && fs::exists(sopts.path))
    split = load_split_json(sopts.path, events);
  else
    split = stratified_split(events, parse_split(sopts));

  const auto train_ev = select_events(events, split.train);
  const auto val_ev = select_events(events, split.validation);
  const auto test_ev = select_events(events, split.test);

  // Candidate configs: the base config plus any "trees:depth:lr" grid entries,
  // ranked by validation RMSE of the cell-wise models.
  std::vector<GbtConfig> candidates{base};
  for (const std::string& g : grid) {
    GbtConfig c = base;
    if (std::sscanf(g.c_str(), "%d:%d:%lf", &c.n_trees, &c.max_depth,
                    &c.learning_rate) != 3)
      fail(errc::bad_config, "grid entry must look like trees:depth:lr, got " + g);
    candidates.push_back(c);
  }

  std::size_t best = 0;
  double best_rmse = 0.0;
  CellwiseEstimator best_cellwise;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CellwiseEstimator cw = train_cellwise(mesh, train_ev, candidates[i], common.workers);
    const EvalReport val = val_ev.empty()
                               ? EvalReport{}
                               : evaluate_cellwise(mesh, cw, val_ev, common.workers);
    const double rmse = val_ev.empty() ? 0.0 : val.overall.rmse;
    std::cout << "candidate " << i << ": validation rmse " << rmse << "\n";
    if (i == 0 || rmse < best_rmse) {
      best = i;
      best_rmse = rmse;
      best_cellwise = std::move(cw);
    }
  }
  const GbtConfig chosen = candidates[best];
  const UniversalEstimator uni = train_universal(mesh, train_ev, chosen);

  save_cellwise_store((fs::path(store_dir) / "cellwise").string(), best_cellwise, chosen);
  save_universal_store((fs::path(store_dir) / "universal").string(), uni, chosen);

  nlohmann::ordered_json eval = {{"chosen_candidate", best},
                                 {"validation_rmse", best_rmse}};
  if (!test_ev.empty()) {
    eval["cellwise_test"] =
        report_json(evaluate_cellwise(mesh, best_cellwise, test_ev, common.workers));
    eval["universal_test"] =
        report_json(evaluate_universal(mesh, uni, test_ev, common.workers));
  }
  write_file_atomic((fs::path(store_dir) / "eval.json").string(), eval.dump(1));
  std::cout << eval.dump(1) << "\n";
  return 0;
}

int cmd_eval_estimator(const CommonOpts& common, const std::string& store_dir,
                       const std::string& split_path) {
  const Mesh mesh = load_mesh(common);
  auto events = load_events(common, mesh);
  if (!split_path.empty()) {
    const SplitResult split = load_split_json(split_path, events);
    events = select_events(events, split.test);
  }
  const CellwiseEstimator cw =
      load_cellwise_store((fs::path(store_dir) / "cellwise").string(), mesh);
  const UniversalEstimator uni =
      load_universal_store((fs::path(store_dir) / "universal").string(), mesh);
  nlohmann::ordered_json out = {
      {"cellwise", report_json(evaluate_cellwise(mesh, cw, events, common.workers))},
      {"universal", report_json(evaluate_universal(mesh, uni, events, common.workers))}};
  std::cout << out.dump(1) << "\n";
  return 0;
}

int cmd_train_generator(const CommonOpts& common, const std::string& points_path,
                        bool allow_dry, std::size_t check_n, std::uint64_t seed,
                        const std::string& out_path) {
  const Mesh mesh = load_mesh(common);
  PointCloud train;
  if (!points_path.empty()) {
    train = load_points_csv(points_path);
  } else {
    const auto events = load_events(common, mesh);
    train = points_from_events(mesh, events);
  }
  GeneratorConfig cfg;
  cfg.allow_dry = allow_dry;
  const GeneratorModel model = fit_generator(train, cfg);
  save_generator_json(out_path, model);

  nlohmann::ordered_json info = {{"records", train.size()}, {"backend", model.backend}};
  if (check_n > 0) {
    const PointCloud sample = sample_constrained(model, check_n, mesh, seed);
    const QualityReport q = quality_score(train, sample);
    info["quality_score"] = q.score;
    for (std::size_t i = 0; i < q.features.size(); ++i)
      info["ks"][q.features[i]] = q.ks[i];
  }
  write_file_atomic(out_path + ".quality.json", info.dump(1));
  std::cout << info.dump(1) << "\n";
  return 0;
}

int cmd_sample_points(const CommonOpts& common, const std::string& generator_path,
                      std::size_t n, std::uint64_t seed, const std::string& out_path) {
  const Mesh mesh = load_mesh(common);
  const GeneratorModel model = load_generator_json(generator_path);
  save_points_csv(out_path, sample_constrained(model, n, mesh, seed));
  std::cout << "wrote " << n << " records to " << out_path << "\n";
  return 0;
}

int cmd_build_pools(const CommonOpts& common, const std::string& points_path,
                    double theta1, double theta2, const std::string& out_prefix) {
  const Mesh mesh = load_mesh(common);
  const auto events = load_events(common, mesh);
  const PointCloud cloud = load_points_csv(points_path);
  std::vector<ThresholdSet> thresholds(mesh.cell_count());
  parallel_for(mesh.cell_count(), common.workers, [&](std::size_t c) {
    thresholds[c] =
        compute_thresholds(events, mesh, static_cast<std::int32_t>(c), theta1, theta2);
  });
  const PoolSet pools = build_pools(cloud, mesh, thresholds, common.workers);
  save_pools(out_prefix + ".csv", out_prefix + "_manifest.json", pools);
  std::cout << "indexed " << pools.total_indexed() << " points, skipped "
            << pools.skipped_outside << " outside the study area\n";
  return 0;
}

int cmd_gen_events(const CommonOpts& common, const std::string& store_dir,
                   const std::string& points_path, const std::string& pools_prefix,
                   std::size_t n, std::uint64_t seed, const KnnRule& rule,
                   const std::string& out_dir) {
  const Mesh mesh = load_mesh(common);
  const CellwiseEstimator est =
      load_cellwise_store((fs::path(store_dir) / "cellwise").string(), mesh);
  const PointCloud cloud = load_points_csv(points_path);
  const PoolSet pools =
      load_pools(pools_prefix + ".csv", pools_prefix + "_manifest.json", mesh);
  const auto batch =
      generate_batch(pools, cloud, mesh, est, n, seed, rule, common.workers);
  fs::create_directories(out_dir);
  std::vector<std::string> files;
  files.reserve(batch.size());
  for (const SyntheticEvent& ev : batch) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "event_%06lld.csv",
                  static_cast<long long>(ev.event_id));
    files.emplace_back(buf);
    save_synthetic_csv((fs::path(out_dir) / buf).string(), ev);
  }
  save_batch_manifest((fs::path(out_dir) / "batch_manifest.json").string(), batch, seed,
                      files);
  std::cout << "wrote " << batch.size() << " events to " << out_dir << "\n";
  return 0;
}

int cmd_eval_synth(const CommonOpts& common, const std::string& batch_manifest,
                   int repeats, std::uint64_t seed, bool no_sort,
                   const std::string& out_path) {
  const Mesh mesh = load_mesh(common);
  const auto events = load_events(common, mesh);
  for (const auto& ev : events)
    if (!ev.has_depth())
      fail(errc::missing_depths, "training events need depths for comparison");
  const auto depths = batch_depths(batch_manifest, mesh);
  if (depths.size() < events.size())
    fail(errc::synth_smaller_than_train,
         "need at least as many synthetic events as training events");

  std::vector<CellComparison> comparisons(mesh.cell_count());
  CompareOptions opt;
  opt.repeats = repeats;
  opt.sort_vectors = !no_sort;
  parallel_for(mesh.cell_count(), common.workers, [&](std::size_t c) {
    std::vector<double> train_d(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) train_d[e] = events[e].depth_ft[c];
    std::vector<double> synth_d(depths.size());
    for (std::size_t e = 0; e < depths.size(); ++e) synth_d[e] = depths[e][c];
    CompareOptions cell_opt = opt;
    cell_opt.seed = mix_seed(seed, c);
    comparisons[c] = compare_cell(train_d, synth_d, cell_opt);
    comparisons[c].cell_id = static_cast<std::int32_t>(c);
  });
  const auto rows = aggregate_report(comparisons, mesh);
  save_report_csv(out_path, rows);
  for (const SummaryRow& r : rows)
    if (r.metric == "cosine" || r.metric == "kl")
      std::cout << r.partition << " " << r.metric << ": mean " << r.mean << ", median "
                << r.q50 << "\n";
  return 0;
}

int cmd_probmap(const CommonOpts& common, const std::string& batch_manifest,
                const std::vector<double>& thresholds, int raster_width,
                const std::string& out_dir) {
  const Mesh mesh = load_mesh(common);
  const auto depths = batch_depths(batch_manifest, mesh);
  fs::create_directories(out_dir);
  for (double t : thresholds) {
    ProbabilityMap map = probability_map_from_depths(depths, t, mesh.fingerprint());
    char buf[48];
    std::snprintf(buf, sizeof(buf), "probmap_%gft", t);
    const std::string stem = (fs::path(out_dir) / buf).string();
    save_probmap_geojson(stem + ".geojson", mesh, map);
    save_probmap_csv(stem + ".csv", map);
    save_probmap_png(stem + ".png", mesh, map, raster_width);
    std::cout << "threshold " << t << " ft -> " << stem << ".{geojson,csv,png}\n";
  }
  return 0;
}

int cmd_bench_synthetic(const BenchConfig& cfg, const std::string& out_dir) {
  const Benchmark bench = make_benchmark(cfg);
  fs::create_directories(out_dir);
  bench.mesh.save_geojson((fs::path(out_dir) / "mesh.geojson").string());
  save_events_csv((fs::path(out_dir) / "events.csv").string(), bench.events);
  std::cout << "benchmark: " << bench.mesh.cell_count() << " cells, "
            << bench.mesh.watershed_count() << " watersheds, " << bench.events.size()
            << " events -> " << out_dir << "\n";
  return 0;
}

int cmd_generate(const CommonOpts& common, const SplitOpts& sopts,
                 const std::string& store_dir, std::size_t cloud_size, std::size_t n,
                 double theta1, double theta2, const KnnRule& rule,
                 const std::vector<double>& thresholds, int raster_width,
                 std::uint64_t seed, int repeats, const std::string& out_dir) {
  const Mesh mesh = load_mesh(common);
  const auto events = load_events(common, mesh);
  SplitResult split;
  if (!sopts.path.empty() && fs::exists(sopts.path))
    split = load_split_json(sopts.path, events);
  else
    split = stratified_split(events, parse_split(sopts));
  const auto train_ev = select_events(events, split.train);

  const CellwiseEstimator est =
      load_cellwise_store((fs::path(store_dir) / "cellwise").string(), mesh);
  fs::create_directories(out_dir);

  const PointCloud train_points = points_from_events(mesh, train_ev);
  const GeneratorModel model = fit_generator(train_points, {});
  save_generator_json((fs::path(out_dir) / "generator.json").string(), model);

  const PointCloud cloud =
      sample_constrained(model, cloud_size, mesh, mix_seed(seed, 1));
  save_points_csv((fs::path(out_dir) / "points.csv").string(), cloud);
  const QualityReport quality = quality_score(train_points, cloud);

  std::vector<ThresholdSet> th(mesh.cell_count());
  parallel_for(mesh.cell_count(), common.workers, [&](std::size_t c) {
    th[c] =
        compute_thresholds(train_ev, mesh, static_cast<std::int32_t>(c), theta1, theta2);
  });
  const PoolSet pools = build_pools(cloud, mesh, th, common.workers);
  save_pools((fs::path(out_dir) / "pools.csv").string(),
             (fs::path(out_dir) / "pools_manifest.json").string(), pools);

  const auto batch =
      generate_batch(pools, cloud, mesh, est, n, mix_seed(seed, 2), rule, common.workers);
  const std::string events_dir = (fs::path(out_dir) / "events").string();
  fs::create_directories(events_dir);
  std::vector<std::string> files;
  for (const SyntheticEvent& ev : batch) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "event_%06lld.csv",
                  static_cast<long long>(ev.event_id));
    files.emplace_back(buf);
    save_synthetic_csv((fs::path(events_dir) / buf).string(), ev);
  }
  save_batch_manifest((fs::path(events_dir) / "batch_manifest.json").string(), batch,
                      mix_seed(seed, 2), files);

  if (batch.size() >= train_ev.size()) {
    std::vector<CellComparison> comparisons(mesh.cell_count());
    parallel_for(mesh.cell_count(), common.workers, [&](std::size_t c) {
      std::vector<double> train_d(train_ev.size());
      for (std::size_t e = 0; e < train_ev.size(); ++e)
        train_d[e] = train_ev[e].depth_ft[c];
      std::vector<double> synth_d(batch.size());
      for (std::size_t e = 0; e < batch.size(); ++e) synth_d[e] = batch[e].depth_ft[c];
      CompareOptions opt;
      opt.repeats = repeats;
      opt.seed = mix_seed(seed, 3 + c);
      comparisons[c] = compare_cell(train_d, synth_d, opt);
      comparisons[c].cell_id = static_cast<std::int32_t>(c);
    });
    save_report_csv((fs::path(out_dir) / "comparison.csv").string(),
                    aggregate_report(comparisons, mesh));
  }

  for (double t : thresholds) {
    ProbabilityMap map = probability_map(mesh, batch, t);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "probmap_%gft", t);
    const std::string stem = (fs::path(out_dir) / buf).string();
    save_probmap_geojson(stem + ".geojson", mesh, map);
    save_probmap_csv(stem + ".csv", map);
    save_probmap_png(stem + ".png", mesh, map, raster_width);
  }

  nlohmann::ordered_json manifest = {{"seed", seed},
                                     {"cloud_size", cloud.size()},
                                     {"events_generated", batch.size()},
                                     {"quality_score", quality.score},
                                     {"mesh_fingerprint", mesh.fingerprint()}};
  write_file_atomic((fs::path(out_dir) / "run_manifest.json").string(),
                    manifest.dump(1));
  std::cout << manifest.dump(1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precipitation-flood probability pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "declarative key-value config; flags override it");

  CommonOpts common;
  SplitOpts sopts;
  GbtConfig gbt;
  KnnRule knn;
  BenchConfig bench_cfg;

  std::string out_dir = "out";
  std::string out_path;
  std::string store_dir = "store";
  std::string points_path;
  std::string generator_path;
  std::string batch_manifest;
  std::vector<std::string> grid;
  std::vector<double> thresholds{1.0, 2.0, 4.0, 6.0};
  double theta1 = 0.5, theta2 = 0.5;
  std::size_t n_points = 100000, n_events = 100, check_n = 0, cloud_size = 100000;
  std::uint64_t seed = 0;
  int repeats = 50, raster_width = 1024;
  bool allow_dry = false, no_sort = false;

  auto* ingest = app.add_subcommand("ingest", "validate and normalize mesh + events");
  add_common(ingest, common);
  ingest->add_option("--out", out_dir, "output directory")->required();

  auto* split = app.add_subcommand("split", "stratified train/validation/test split");
  add_common(split, common);
  add_split(split, sopts);
  split->add_option("--out", sopts.path, "split JSON path")->required();

  auto* train_est =
      app.add_subcommand("train-estimator", "train cell-wise + universal depth models");
  add_common(train_est, common);
  add_split(train_est, sopts);
  train_est->add_option("--split", sopts.path, "reuse an existing split JSON");
  add_gbt(train_est, gbt);
  train_est->add_option("--grid", grid,
                        "extra candidate configs as trees:depth:lr, ranked on the "
                        "validation split");
  train_est->add_option("--store", store_dir, "model store directory")->required();

  auto* eval_est = app.add_subcommand("eval-estimator", "evaluate a stored estimator");
  add_common(eval_est, common);
  eval_est->add_option("--store", store_dir, "model store directory")->required();
  eval_est->add_option("--split", out_path, "split JSON; evaluates its test set");

  auto* train_gen =
      app.add_subcommand("train-generator", "fit the tabular point generator");
  add_common(train_gen, common, false);
  train_gen->add_option("--events", common.events_path,
                        "events CSV; rows become training point records");
  train_gen->add_option("--points", points_path, "train from an existing point CSV");
  train_gen->add_flag("--allow-dry", allow_dry, "accept all-zero precipitation records");
  train_gen->add_option("--check-n", check_n, "sample size for the self-quality report");
  train_gen->add_option("--seed", seed, "sampling seed for the quality check");
  train_gen->add_option("--out", out_path, "generator JSON path")->required();

  auto* sample = app.add_subcommand("sample-points", "draw a constrained point cloud");
  add_common(sample, common, false);
  sample->add_option("--generator", generator_path, "generator JSON")->required();
  sample->add_option("--n", n_points, "records to draw")->required();
  sample->add_option("--seed", seed, "sampling seed");
  sample->add_option("--out", out_path, "point cloud CSV")->required();

  auto* pools_cmd = app.add_subcommand("build-pools", "index a point cloud into pools");
  add_common(pools_cmd, common);
  pools_cmd->add_option("--points", points_path, "point cloud CSV")->required();
  pools_cmd->add_option("--theta1", theta1, "low boundary offset, in std deviations");
  pools_cmd->add_option("--theta2", theta2, "high boundary offset, in std deviations");
  pools_cmd->add_option("--out-prefix", out_path, "pool file prefix")->required();

  auto* gen = app.add_subcommand("gen-events", "synthesize precipitation-flood events");
  add_common(gen, common, false);
  gen->add_option("--store", store_dir, "model store directory")->required();
  gen->add_option("--points", points_path, "point cloud CSV backing the pools")
      ->required();
  gen->add_option("--pools-prefix", generator_path, "pool file prefix")->required();
  gen->add_option("--n", n_events, "events to generate");
  gen->add_option("--seed", seed, "batch seed");
  add_knn(gen, knn);
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* evals = app.add_subcommand("eval-synth", "compare synthetic vs training depths");
  add_common(evals, common);
  evals->add_option("--batch", batch_manifest, "batch manifest JSON")->required();
  evals->add_option("--repeats", repeats, "downsampling repeats per cell");
  evals->add_option("--seed", seed, "downsampling seed");
  evals->add_flag("--no-sort", no_sort, "compare event-ordered vectors instead of "
                                        "sorted quantile vectors");
  evals->add_option("--out", out_path, "report CSV path")->required();

  auto* pm = app.add_subcommand("probmap", "exceedance-probability maps");
  add_common(pm, common, false);
  pm->add_option("--batch", batch_manifest, "batch manifest JSON")->required();
  pm->add_option("--thresholds", thresholds, "depth thresholds in feet");
  pm->add_option("--raster-width", raster_width, "PNG width in pixels");
  pm->add_option("--out", out_dir, "output directory")->required();

  auto* bench = app.add_subcommand("bench-synthetic",
                                   "emit the bundled synthetic benchmark dataset");
  bench->add_option("--grid-x", bench_cfg.grid_x, "cells per row");
  bench->add_option("--grid-y", bench_cfg.grid_y, "cells per column");
  bench->add_option("--watersheds", bench_cfg.watersheds, "watershed count");
  bench->add_option("--events", bench_cfg.n_events, "event count");
  bench->add_option("--seed", bench_cfg.seed, "construction seed");
  bench->add_option("--out", out_dir, "output directory")->required();

  auto* full = app.add_subcommand(
      "generate", "full chain: generator -> cloud -> pools -> events -> reports -> maps");
  add_common(full, common);
  add_split(full, sopts);
  full->add_option("--split", sopts.path, "reuse an existing split JSON");
  full->add_option("--store", store_dir, "model store directory")->required();
  full->add_option("--cloud-size", cloud_size, "synthetic point records to draw");
  full->add_option("--n", n_events, "events to generate");
  full->add_option("--theta1", theta1, "low boundary offset, in std deviations");
  full->add_option("--theta2", theta2, "high boundary offset, in std deviations");
  add_knn(full, knn);
  full->add_option("--thresholds", thresholds, "map thresholds in feet");
  full->add_option("--raster-width", raster_width, "PNG width in pixels");
  full->add_option("--seed", seed, "master seed");
  full->add_option("--repeats", repeats, "downsampling repeats per cell");
  full->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the parse error
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(common, out_dir);
    if (split->parsed()) return cmd_split(common, sopts);
    if (train_est->parsed())
      return cmd_train_estimator(common, sopts, gbt, store_dir, grid);
    if (eval_est->parsed()) return cmd_eval_estimator(common, store_dir, out_path);
    if (train_gen->parsed())
      return cmd_train_generator(common, points_path, allow_dry, check_n, seed, out_path);
    if (sample->parsed())
      return cmd_sample_points(common, generator_path, n_points, seed, out_path);
    if (pools_cmd->parsed())
      return cmd_build_pools(common, points_path, theta1, theta2, out_path);
    if (gen->parsed())
      return cmd_gen_events(common, store_dir, points_path, generator_path, n_events,
                            seed, knn, out_dir);
    if (evals->parsed())
      return cmd_eval_synth(common, batch_manifest, repeats, seed, no_sort, out_path);
    if (pm->parsed())
      return cmd_probmap(common, batch_manifest, thresholds, raster_width, out_dir);
    if (bench->parsed()) return cmd_bench_synthetic(bench_cfg, out_dir);
    if (full->parsed())
      return cmd_generate(common, sopts, store_dir, cloud_size, n_events, theta1, theta2,
                          knn, thresholds, raster_width, seed, repeats, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

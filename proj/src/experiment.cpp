#include "pnal/experiment.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pnal/scene_io.hpp"

namespace pnal {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Streams of the experiment seed.
constexpr std::uint64_t kBenchmarkStream = 100;
constexpr std::uint64_t kNoiseStream = 101;
constexpr std::uint64_t kTrainStream = 102;
constexpr std::uint64_t kInitStream = 103;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config key '") + key + "': " + e.what());
  }
}

std::string noise_kind_name(NoiseKind k) { return k == NoiseKind::Symmetric ? "symmetric" : "asymmetric"; }

json manifest_entry(const std::string& command, const std::string& kind, const fs::path& rel) {
  return json{{"command", command}, {"kind", kind}, {"path", rel.generic_string()}};
}

// Replaces the entries of `command` in out_dir/manifest.jsonl.
void write_manifest(const fs::path& out_dir, const std::string& command, const std::vector<json>& entries) {
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "manifest.jsonl";
  std::vector<std::string> kept;
  if (std::ifstream in(path); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || j.value("command", "") != command) kept.push_back(line);
    }
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& line : kept) out << line << '\n';
  for (const auto& e : entries) out << e.dump() << '\n';
}

std::string scene_file_name(std::size_t index) {
  std::ostringstream name;
  name << "scene_" << std::setw(3) << std::setfill('0') << index << ".pnts";
  return name.str();
}

json confusion_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json noise_json(const NoiseStats& s) {
  return json{{"instance_rate", s.instance_rate},  {"point_rate", s.point_rate},
              {"instances", s.instances},          {"noisy_instances", s.noisy_instances},
              {"points", s.points},                {"noisy_points", s.noisy_points},
              {"confusion", confusion_json(s.confusion)}};
}

}  // namespace

std::uint64_t ExperimentConfig::benchmark_seed() const { return derive_seed(seed, kBenchmarkStream); }
std::uint64_t ExperimentConfig::noise_seed() const {
  return noise_seed_set ? noise.seed : derive_seed(seed, kNoiseStream);
}
std::uint64_t ExperimentConfig::train_seed() const {
  return train_seed_set ? pnal.seed : derive_seed(seed, kTrainStream);
}
std::uint64_t ExperimentConfig::init_seed() const { return derive_seed(seed, kInitStream); }

TrainerOptions ExperimentConfig::trainer_options() const {
  TrainerOptions opts;
  opts.method = method;
  opts.pnal = pnal;
  opts.pnal.seed = train_seed();
  if (method != Method::PNAL) opts.pnal.e_warmup = opts.pnal.epochs_total;
  opts.baseline_loss = method == Method::SCE ? sce : gce;
  return opts;
}

void ExperimentConfig::validate() const {
  trainer_options().pnal.validate();
  pnal::validate(noise, static_cast<int>(benchmark_class_names().size()));
  if (!(clustering.eps > 0.0) || clustering.min_pts < 1) throw Error("clustering needs eps > 0 and min_pts >= 1");
  if (hidden < 1) throw Error("model.hidden must be positive");
  gce.validate();
  sce.validate();
  if (benchmark.train_scenes < 1 || benchmark.test_scenes < 0) throw Error("benchmark scene counts invalid");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root,
                 {"seed", "method", "data_dir", "labels_dir", "out_dir", "benchmark", "noise", "pnal",
                  "clustering", "model", "loss", "snapshot_labels"},
                 "config");
  ExperimentConfig c;
  if (!root.contains("seed")) throw Error("config key 'seed' is mandatory");
  read(root, "seed", c.seed);
  if (root.contains("method")) c.method = parse_method(root.at("method").get<std::string>());
  std::string path;
  if (root.contains("data_dir")) c.data_dir = root.at("data_dir").get<std::string>();
  if (root.contains("labels_dir")) c.labels_dir = root.at("labels_dir").get<std::string>();
  if (root.contains("out_dir")) c.out_dir = root.at("out_dir").get<std::string>();
  read(root, "snapshot_labels", c.snapshot_labels);

  if (root.contains("benchmark")) {
    const json& b = root.at("benchmark");
    reject_unknown(b, {"train_scenes", "test_scenes", "structure_density", "object_density", "color_noise",
                       "instance_tint", "jitter"},
                   "benchmark");
    read(b, "train_scenes", c.benchmark.train_scenes);
    read(b, "test_scenes", c.benchmark.test_scenes);
    read(b, "structure_density", c.benchmark.structure_density);
    read(b, "object_density", c.benchmark.object_density);
    read(b, "color_noise", c.benchmark.color_noise);
    read(b, "instance_tint", c.benchmark.instance_tint);
    read(b, "jitter", c.benchmark.jitter);
  }
  if (root.contains("noise")) {
    const json& n = root.at("noise");
    reject_unknown(n, {"kind", "tau", "tau_pair", "pairs", "seed"}, "noise");
    if (n.contains("kind")) {
      const auto kind = n.at("kind").get<std::string>();
      if (kind == "symmetric") c.noise.kind = NoiseKind::Symmetric;
      else if (kind == "asymmetric") c.noise.kind = NoiseKind::Asymmetric;
      else throw Error("noise.kind must be symmetric or asymmetric");
    }
    read(n, "tau", c.noise.tau);
    read(n, "tau_pair", c.noise.tau_pair);
    if (n.contains("pairs")) {
      for (const auto& p : n.at("pairs")) {
        if (!p.is_array() || p.size() != 2) throw Error("noise.pairs entries must be [a, b]");
        c.noise.pairs.emplace_back(p[0].get<ClassId>(), p[1].get<ClassId>());
      }
    }
    if (n.contains("seed")) {
      read(n, "seed", c.noise.seed);
      c.noise_seed_set = true;
    }
  }
  if (root.contains("pnal")) {
    const json& p = root.at("pnal");
    reject_unknown(p, {"q", "sigma", "gamma", "epochs_total", "e_warmup", "lr", "momentum", "block_size", "stride",
                       "sample_n", "seed", "record_wall_time"},
                   "pnal");
    read(p, "q", c.pnal.q);
    read(p, "sigma", c.pnal.sigma);
    read(p, "gamma", c.pnal.gamma);
    read(p, "epochs_total", c.pnal.epochs_total);
    read(p, "e_warmup", c.pnal.e_warmup);
    read(p, "lr", c.pnal.lr);
    read(p, "momentum", c.pnal.momentum);
    read(p, "block_size", c.pnal.block_size);
    read(p, "stride", c.pnal.stride);
    read(p, "sample_n", c.pnal.sample_n);
    read(p, "record_wall_time", c.pnal.record_wall_time);
    if (p.contains("seed")) {
      read(p, "seed", c.pnal.seed);
      c.train_seed_set = true;
    }
  }
  if (root.contains("clustering")) {
    const json& k = root.at("clustering");
    reject_unknown(k, {"eps", "min_pts"}, "clustering");
    read(k, "eps", c.clustering.eps);
    read(k, "min_pts", c.clustering.min_pts);
  }
  if (root.contains("model")) {
    const json& m = root.at("model");
    reject_unknown(m, {"hidden"}, "model");
    read(m, "hidden", c.hidden);
  }
  if (root.contains("loss")) {
    const json& l = root.at("loss");
    reject_unknown(l, {"gce_q", "sce_alpha", "sce_beta", "log_zero_floor"}, "loss");
    read(l, "gce_q", c.gce.q_gce);
    read(l, "sce_alpha", c.sce.alpha);
    read(l, "sce_beta", c.sce.beta);
    read(l, "log_zero_floor", c.sce.log_zero_floor);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json pairs = json::array();
  for (auto [a, b] : c.noise.pairs) pairs.push_back({a, b});
  json root{
      {"seed", c.seed},
      {"method", to_string(c.method)},
      {"data_dir", c.data_dir.generic_string()},
      {"labels_dir", c.labels_dir.generic_string()},
      {"out_dir", c.out_dir.generic_string()},
      {"snapshot_labels", c.snapshot_labels},
      {"benchmark",
       {{"train_scenes", c.benchmark.train_scenes},
        {"test_scenes", c.benchmark.test_scenes},
        {"structure_density", c.benchmark.structure_density},
        {"object_density", c.benchmark.object_density},
        {"color_noise", c.benchmark.color_noise},
        {"instance_tint", c.benchmark.instance_tint},
        {"jitter", c.benchmark.jitter}}},
      {"noise",
       {{"kind", noise_kind_name(c.noise.kind)}, {"tau", c.noise.tau}, {"tau_pair", c.noise.tau_pair}, {"pairs", pairs}}},
      {"pnal",
       {{"q", c.pnal.q},
        {"sigma", c.pnal.sigma},
        {"gamma", c.pnal.gamma},
        {"epochs_total", c.pnal.epochs_total},
        {"e_warmup", c.pnal.e_warmup},
        {"lr", c.pnal.lr},
        {"momentum", c.pnal.momentum},
        {"block_size", c.pnal.block_size},
        {"stride", c.pnal.stride},
        {"sample_n", c.pnal.sample_n},
        {"record_wall_time", c.pnal.record_wall_time}}},
      {"clustering", {{"eps", c.clustering.eps}, {"min_pts", c.clustering.min_pts}}},
      {"model", {{"hidden", c.hidden}}},
      {"loss",
       {{"gce_q", c.gce.q_gce}, {"sce_alpha", c.sce.alpha}, {"sce_beta", c.sce.beta}, {"log_zero_floor", c.sce.log_zero_floor}}},
  };
  if (c.noise_seed_set) root["noise"]["seed"] = c.noise.seed;
  if (c.train_seed_set) root["pnal"]["seed"] = c.pnal.seed;
  return root.dump(2);
}

Benchmark make_benchmark(const ExperimentConfig& config) {
  return default_benchmark(config.benchmark_seed(), config.benchmark);
}

NoiseOutcome make_noisy_labels(const ExperimentConfig& config, std::span<const Scene> train) {
  NoiseOutcome out;
  Rng rng(config.noise_seed());
  if (config.noise.kind == NoiseKind::Symmetric) {
    out.labels = inject_symmetric(train, config.noise.tau, rng);
  } else {
    auto asym = inject_asymmetric(train, config.noise.tau, config.noise.tau_pair, config.noise.pairs, rng);
    out.labels = std::move(asym.labels);
    out.unpaired_rate = asym.unpaired_rate;
    out.warnings = std::move(asym.warnings);
  }
  for (std::size_t s = 0; s < train.size(); ++s) out.stats += measure_noise(train[s], out.labels[s]);
  return out;
}

Model initial_model(const ExperimentConfig& config, int num_classes) {
  Rng rng(config.init_seed());
  return Model::glorot(kFeatureDim, config.hidden, num_classes, rng);
}

TrainingResult train_model(const ExperimentConfig& config, std::span<const Scene> train,
                           std::vector<LabelStore> labels, std::span<const Scene> test,
                           const EpochCallback& on_epoch) {
  if (train.empty()) throw Error("no training scenes");
  const DbscanClusterer clusterer(config.clustering);
  return run_training(train, std::move(labels), test, config.trainer_options(), clusterer,
                      initial_model(config, train.front().num_classes()), on_epoch);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Benchmark bench = make_benchmark(config);
  NoiseOutcome noisy = make_noisy_labels(config, bench.train);
  ExperimentResult result;
  result.noise = noisy.stats;
  result.training = train_model(config, bench.train, std::move(noisy.labels), bench.test);
  return result;
}

void cmd_gen_data(const ExperimentConfig& config) {
  const Benchmark bench = make_benchmark(config);
  std::vector<json> entries;
  auto emit = [&](const std::vector<Scene>& scenes, const std::string& split) {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const fs::path rel = fs::path(split) / scene_file_name(i);
      write_scene(scenes[i], config.out_dir / rel);
      json e = manifest_entry("gen-data", "scene", rel);
      e["split"] = split;
      e["points"] = scenes[i].size();
      entries.push_back(e);
    }
  };
  emit(bench.train, "train");
  emit(bench.test, "test");
  json cfg = manifest_entry("gen-data", "config", "gen_data_config.json");
  fs::create_directories(config.out_dir);
  std::ofstream(config.out_dir / "gen_data_config.json") << dump_config(config) << '\n';
  entries.push_back(cfg);
  write_manifest(config.out_dir, "gen-data", entries);
}

std::vector<SceneEntry> list_scenes(const fs::path& data_dir) {
  const fs::path path = data_dir / "manifest.jsonl";
  std::ifstream in(path);
  if (!in) throw MissingInput("no manifest at " + path.string() + " (run gen-data first)");
  std::vector<SceneEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error("malformed manifest line: " + line);
    if (j.value("command", "") != "gen-data" || j.value("kind", "") != "scene") continue;
    out.push_back({j.at("split").get<std::string>(), fs::path(j.at("path").get<std::string>())});
  }
  return out;
}

std::vector<Scene> load_split(const fs::path& data_dir, const std::string& split) {
  std::vector<Scene> scenes;
  for (const auto& e : list_scenes(data_dir)) {
    if (e.split == split) scenes.push_back(read_scene(data_dir / e.path));
  }
  if (scenes.empty()) throw MissingInput("no '" + split + "' scenes listed in " + data_dir.string());
  return scenes;
}

fs::path label_path(const fs::path& labels_dir, const SceneEntry& entry) {
  fs::path p = labels_dir / "labels" / entry.path;
  p.replace_extension(".lbls");
  return p;
}

NoiseStats cmd_inject_noise(const ExperimentConfig& config) {
  if (config.data_dir.empty()) throw Error("inject-noise needs a data directory (--data or data_dir)");
  std::vector<SceneEntry> entries;
  for (auto& e : list_scenes(config.data_dir)) {
    if (e.split == "train") entries.push_back(e);
  }
  if (entries.empty()) throw MissingInput("no training scenes in " + config.data_dir.string());
  std::vector<Scene> scenes;
  for (const auto& e : entries) scenes.push_back(read_scene(config.data_dir / e.path));
  NoiseOutcome noisy = make_noisy_labels(config, scenes);

  std::vector<json> manifest;
  fs::create_directories(config.out_dir);
  std::ofstream summary(config.out_dir / "noise_summary.jsonl");
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const fs::path file = label_path(config.out_dir, entries[s]);
    write_labels(scenes[s], noisy.labels[s], file);
    manifest.push_back(manifest_entry("inject-noise", "labels", fs::relative(file, config.out_dir)));
    json line = noise_json(measure_noise(scenes[s], noisy.labels[s]));
    line["scene"] = entries[s].path.generic_string();
    summary << line.dump() << '\n';
  }
  json total = noise_json(noisy.stats);
  total["scene"] = "ALL";
  total["kind"] = noise_kind_name(config.noise.kind);
  total["tau"] = config.noise.tau;
  if (config.noise.kind == NoiseKind::Asymmetric) {
    total["tau_pair"] = config.noise.tau_pair;
    total["unpaired_rate"] = noisy.unpaired_rate;
    total["warnings"] = noisy.warnings;
  }
  summary << total.dump() << '\n';
  for (const auto& w : noisy.warnings) std::cerr << "warning: " << w << '\n';
  manifest.push_back(manifest_entry("inject-noise", "noise_summary", "noise_summary.jsonl"));
  write_manifest(config.out_dir, "inject-noise", manifest);
  return noisy.stats;
}

TrainingResult cmd_train(const ExperimentConfig& config) {
  if (config.data_dir.empty()) throw Error("train needs a data directory (--data or data_dir)");
  std::vector<SceneEntry> train_entries;
  for (auto& e : list_scenes(config.data_dir)) {
    if (e.split == "train") train_entries.push_back(e);
  }
  if (train_entries.empty()) throw MissingInput("no training scenes in " + config.data_dir.string());
  std::vector<Scene> train;
  std::vector<LabelStore> labels;
  for (const auto& e : train_entries) {
    train.push_back(read_scene(config.data_dir / e.path));
    labels.push_back(config.labels_dir.empty() ? LabelStore::from_ground_truth(train.back())
                                               : read_labels(train.back(), label_path(config.labels_dir, e)));
  }
  std::vector<Scene> test;
  for (auto& e : list_scenes(config.data_dir)) {
    if (e.split == "test") test.push_back(read_scene(config.data_dir / e.path));
  }

  std::vector<json> manifest;
  EpochCallback snapshot;
  if (config.snapshot_labels) {
    snapshot = [&](const Trainer& t, const std::vector<EpochReport>&) {
      std::ostringstream dir;
      dir << "snapshots/epoch_" << std::setw(3) << std::setfill('0') << t.epoch();
      for (std::size_t s = 0; s < train.size(); ++s) {
        const fs::path file = label_path(config.out_dir / dir.str(), train_entries[s]);
        write_labels(train[s], t.labels()[s], file);
        manifest.push_back(manifest_entry("train", "label_snapshot", fs::relative(file, config.out_dir)));
      }
    };
  }
  TrainingResult result = train_model(config, train, std::move(labels), test, snapshot);

  fs::create_directories(config.out_dir);
  save_checkpoint(result.model, (config.out_dir / "model.ckpt").string());
  write_metrics_csv(config.out_dir / "metrics.csv", result.log);
  std::ofstream(config.out_dir / "train_config.json") << dump_config(config) << '\n';
  manifest.push_back(manifest_entry("train", "checkpoint", "model.ckpt"));
  manifest.push_back(manifest_entry("train", "metrics", "metrics.csv"));
  manifest.push_back(manifest_entry("train", "config", "train_config.json"));
  write_manifest(config.out_dir, "train", manifest);
  return result;
}

EvalReport cmd_eval(const ExperimentConfig& config, const fs::path& checkpoint, const std::string& split) {
  if (!fs::exists(checkpoint)) throw MissingInput("checkpoint not found: " + checkpoint.string());
  if (config.data_dir.empty()) throw Error("eval needs a data directory (--data or data_dir)");
  const Model model = load_checkpoint<double>(checkpoint.string());
  const std::vector<Scene> scenes = load_split(config.data_dir, split);
  Confusion conf(scenes.front().num_classes());
  for (const Scene& s : scenes) {
    conf.add(predict(model, evaluation_features(s, config.pnal.block_size, config.pnal.stride)), s.gt_labels());
  }
  EvalReport report;
  report.metrics.split = split;
  report.metrics.oa = conf.overall_accuracy();
  report.metrics.miou = conf.mean_iou();
  report.per_class_iou = conf.per_class_iou();

  json iou = json::array();
  for (double v : report.per_class_iou) iou.push_back(std::isnan(v) ? json(nullptr) : json(v));
  const json out{{"split", split}, {"oa", report.metrics.oa}, {"miou", report.metrics.miou}, {"per_class_iou", iou},
                 {"checkpoint", checkpoint.generic_string()}};
  fs::create_directories(config.out_dir);
  std::ofstream(config.out_dir / "eval.json") << out.dump(2) << '\n';
  write_manifest(config.out_dir, "eval", {manifest_entry("eval", "report", "eval.json")});
  return report;
}

std::string cmd_report(const ExperimentConfig& config, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw Error("report needs at least one metrics CSV");
  struct Run {
    std::string name;
    std::vector<EpochReport> rows;
  };
  std::vector<Run> runs;
  for (const auto& arg : inputs) {
    const auto eq = arg.find('=');
    const fs::path path = eq == std::string::npos ? fs::path(arg) : fs::path(arg.substr(eq + 1));
    std::string name = eq == std::string::npos ? path.parent_path().filename().string() : arg.substr(0, eq);
    if (name.empty()) name = path.stem().string();
    runs.push_back({name, read_metrics_csv(path)});
  }

  auto last_of = [](const std::vector<EpochReport>& rows, const std::string& split) {
    const EpochReport* found = nullptr;
    for (const auto& r : rows) {
      if (r.split == split && (!found || r.epoch >= found->epoch)) found = &r;
    }
    return found;
  };

  fs::create_directories(config.out_dir);
  std::ostringstream table;
  table << std::setprecision(std::numeric_limits<double>::max_digits10);
  table << "method,epochs,train_oa,test_oa,test_miou,test_oa_delta,correction_frac,true_correction_frac\n";
  std::vector<json> manifest;
  const EpochReport* base = last_of(runs.front().rows, "test");
  for (const auto& run : runs) {
    const EpochReport* tr = last_of(run.rows, "train");
    const EpochReport* te = last_of(run.rows, "test");
    if (!tr) throw Error("metrics for '" + run.name + "' hold no train rows");
    table << run.name << ',' << tr->epoch << ',' << tr->oa << ',' << (te ? te->oa : 0.0) << ','
          << (te ? te->miou : 0.0) << ',' << (te && base ? te->oa - base->oa : 0.0) << ',' << tr->correction_frac
          << ',' << tr->true_correction_frac << '\n';

    const std::string curve_name = "curve_" + run.name + ".csv";
    std::ofstream curve(config.out_dir / curve_name);
    curve << std::setprecision(std::numeric_limits<double>::max_digits10);
    curve << "epoch,train_oa,test_oa,test_miou,correction_frac,true_correction_frac\n";
    for (const auto& r : run.rows) {
      if (r.split != "train") continue;
      double test_oa = 0.0, test_miou = 0.0;
      for (const auto& t : run.rows) {
        if (t.split == "test" && t.epoch == r.epoch) {
          test_oa = t.oa;
          test_miou = t.miou;
        }
      }
      curve << r.epoch << ',' << r.oa << ',' << test_oa << ',' << test_miou << ',' << r.correction_frac << ','
            << r.true_correction_frac << '\n';
    }
    manifest.push_back(manifest_entry("report", "curve", curve_name));
  }
  std::ofstream(config.out_dir / "report.csv") << table.str();
  manifest.push_back(manifest_entry("report", "table", "report.csv"));
  write_manifest(config.out_dir, "report", manifest);
  return table.str();
}

}  // namespace pnal

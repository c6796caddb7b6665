#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pnal/dbscan.hpp"
#include "pnal/noise.hpp"
#include "pnal/synth.hpp"
#include "pnal/trainer.hpp"

namespace pnal {

/// Everything one experiment needs. Loaded from a JSON file whose keys
/// mirror these fields (see README); unknown keys are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  Method method = Method::PNAL;
  std::filesystem::path data_dir;
  std::filesystem::path labels_dir;
  std::filesystem::path out_dir = "out";
  BenchmarkOptions benchmark;
  NoiseConfig noise;
  bool noise_seed_set = false;
  PnalConfig pnal;
  bool train_seed_set = false;
  DbscanParams clustering;
  int hidden = 64;
  LossKind gce = LossKind::gce();
  LossKind sce = LossKind::sce();
  bool snapshot_labels = false;

  /// Seeds of the independent random streams, derived from `seed` unless
  /// set explicitly in the file.
  std::uint64_t benchmark_seed() const;
  std::uint64_t noise_seed() const;
  std::uint64_t train_seed() const;
  std::uint64_t init_seed() const;

  TrainerOptions trainer_options() const;
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

/// In-memory pipeline pieces, shared by the CLI and the test suites.
Benchmark make_benchmark(const ExperimentConfig& config);

struct NoiseOutcome {
  std::vector<LabelStore> labels;
  NoiseStats stats;
  double unpaired_rate = 0.0;
  std::vector<std::string> warnings;
};
NoiseOutcome make_noisy_labels(const ExperimentConfig& config, std::span<const Scene> train);

Model initial_model(const ExperimentConfig& config, int num_classes);

TrainingResult train_model(const ExperimentConfig& config, std::span<const Scene> train,
                           std::vector<LabelStore> labels, std::span<const Scene> test,
                           const EpochCallback& on_epoch = {});

/// gen -> noise -> train, without touching the filesystem.
struct ExperimentResult {
  TrainingResult training;
  NoiseStats noise;
};
ExperimentResult run_experiment(const ExperimentConfig& config);

// CLI subcommands. Each writes below config.out_dir and records its files in
// out_dir/manifest.jsonl (entries of earlier runs of the same command are
// replaced). Errors: Error -> exit 1, MissingInput -> exit 2.
void cmd_gen_data(const ExperimentConfig& config);
NoiseStats cmd_inject_noise(const ExperimentConfig& config);
TrainingResult cmd_train(const ExperimentConfig& config);

struct EvalReport {
  EpochReport metrics;
  std::vector<double> per_class_iou;
};
EvalReport cmd_eval(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                    const std::string& split);

/// inputs: "name=path/metrics.csv" or a bare path (name = parent directory).
/// Writes report.csv (final metrics per method with the OA delta against the
/// first input) and curve_<name>.csv per method. Returns the table text.
std::string cmd_report(const ExperimentConfig& config, const std::vector<std::string>& inputs);

struct SceneEntry {
  std::string split;
  std::filesystem::path path;  // relative to the data directory
};
/// Scenes listed by gen-data in data_dir/manifest.jsonl.
std::vector<SceneEntry> list_scenes(const std::filesystem::path& data_dir);
std::vector<Scene> load_split(const std::filesystem::path& data_dir, const std::string& split);
std::filesystem::path label_path(const std::filesystem::path& labels_dir, const SceneEntry& entry);

}  // namespace pnal

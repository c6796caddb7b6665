#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pnal/blocks.hpp"
#include "pnal/clusterer.hpp"
#include "pnal/history.hpp"
#include "pnal/label_store.hpp"
#include "pnal/loss.hpp"
#include "pnal/metrics.hpp"
#include "pnal/mlp.hpp"
#include "pnal/random.hpp"

namespace pnal {

enum class Method { CE, GCE, SCE, PNAL };

Method parse_method(const std::string& name);
std::string to_string(Method method);

/// Schedule and selection hyperparameters. Defaults follow the reference
/// setting: 30 epochs, 5 of them warm-up (one fifth of the 25 cleaning
/// epochs), history length 4, vote divisor 4, 1 m blocks at 0.5 m stride,
/// 4096 points per block.
struct PnalConfig {
  int q = 4;
  double sigma = 0.7;
  double gamma = 4.0;
  int epochs_total = 30;
  int e_warmup = 5;
  double lr = 0.003;
  double momentum = 0.9;
  double block_size = 1.0;
  double stride = 0.5;
  std::size_t sample_n = 4096;
  std::uint64_t seed = 0;
  bool record_wall_time = false;

  int e_clean() const { return epochs_total - e_warmup; }
  /// Throws Error. q <= e_warmup is only enforced when a cleaning stage runs.
  void validate() const;
};

struct TrainerOptions {
  Method method = Method::PNAL;
  PnalConfig pnal;
  /// Loss of the gce / sce baselines; ce and pnal always train with CE.
  LossKind baseline_loss = LossKind::ce();
};

/// Owns the mutable training state: model, label stores, prediction
/// histories, and the per-block cluster cache (geometry only, built once).
class Trainer {
 public:
  Trainer(std::span<const Scene> train, std::vector<LabelStore> labels, std::span<const Scene> test,
          TrainerOptions options, const Clusterer& clusterer, Model init);

  /// One pass over every block of every training scene, in shuffled order.
  void run_epoch();

  /// OA / mIoU on train and test against ground truth, plus correction
  /// statistics on the train row. Rows are (train, test).
  std::vector<EpochReport> evaluate() const;

  int epoch() const { return epoch_; }
  bool cleaning() const;
  const Model& model() const { return model_; }
  const TrainerOptions& options() const { return options_; }
  const std::vector<LabelStore>& labels() const { return labels_; }
  const std::vector<HistoryBuffer>& histories() const { return histories_; }
  const std::vector<Block>& blocks(std::size_t scene) const { return blocks_[scene]; }
  /// Clusters of one block, as scene point indices.
  const std::vector<std::vector<PointIndex>>& clusters(std::size_t scene, std::size_t block) const {
    return clusters_[scene][block];
  }
  std::size_t corrections_last_epoch() const { return corrections_last_epoch_; }

  /// Predictions for every point of a training or test scene.
  std::vector<ClassId> predict_train(std::size_t scene) const;
  std::vector<ClassId> predict_test(std::size_t scene) const;

 private:
  void process_block(std::size_t scene, std::size_t block, Rng& rng);

  std::span<const Scene> train_;
  std::span<const Scene> test_;
  TrainerOptions options_;
  LossKind loss_;
  Model model_;
  MomentumState<double> momentum_;
  std::vector<LabelStore> labels_;
  std::vector<HistoryBuffer> histories_;
  std::vector<std::vector<int>> recorded_in_epoch_;
  std::vector<std::vector<Block>> blocks_;
  std::vector<std::vector<std::vector<std::vector<PointIndex>>>> clusters_;
  std::vector<FeatureMatrix> train_features_;
  std::vector<FeatureMatrix> test_features_;
  int epoch_ = 0;
  int num_classes_ = 0;
  std::size_t corrections_last_epoch_ = 0;
};

struct TrainingResult {
  Model model;
  std::vector<EpochReport> log;
  std::vector<LabelStore> labels;
};

using EpochCallback = std::function<void(const Trainer&, const std::vector<EpochReport>&)>;

/// Warm-up epochs train CE on the current labels with every point in the
/// loss. Cleaning epochs, per block: record predictions, select reliable
/// points, vote per cluster, overwrite eligible clusters in the shared
/// label store, then train CE on replaced points only. Methods other than
/// pnal never enter the cleaning stage.
TrainingResult run_training(std::span<const Scene> train, std::vector<LabelStore> labels,
                            std::span<const Scene> test, const TrainerOptions& options,
                            const Clusterer& clusterer, Model init, const EpochCallback& on_epoch = {});

/// Evaluation rows for a fixed model (same path the trainer uses).
EpochReport evaluate_model(const Model& model, std::span<const Scene> scenes, double block_size, double stride,
                           int epoch, const std::string& split);

}  // namespace pnal

#include "pnal/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "pnal/selection.hpp"
#include "pnal/voting.hpp"

namespace pnal {

Method parse_method(const std::string& name) {
  if (name == "ce") return Method::CE;
  if (name == "gce") return Method::GCE;
  if (name == "sce") return Method::SCE;
  if (name == "pnal") return Method::PNAL;
  throw Error("unknown method '" + name + "' (expected ce, gce, sce or pnal)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::CE: return "ce";
    case Method::GCE: return "gce";
    case Method::SCE: return "sce";
    case Method::PNAL: return "pnal";
  }
  return "?";
}

void PnalConfig::validate() const {
  if (q < 1) throw Error("history length q must be at least 1");
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw Error("sigma must lie in [0,1]");
  if (!(gamma >= 1.0)) throw Error("gamma must be at least 1");
  if (epochs_total < 1) throw Error("epochs_total must be positive");
  if (e_warmup < 0 || e_warmup > epochs_total) throw Error("e_warmup must lie in [0, epochs_total]");
  if (e_warmup < epochs_total && q > e_warmup) throw Error("history length q must not exceed e_warmup");
  if (!(lr >= 0.0)) throw Error("lr must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error("momentum must lie in [0,1)");
  if (!(block_size > 0.0) || !(stride > 0.0) || stride > block_size) throw Error("invalid block size / stride");
  if (sample_n == 0) throw Error("sample_n must be positive");
}

Trainer::Trainer(std::span<const Scene> train, std::vector<LabelStore> labels, std::span<const Scene> test,
                 TrainerOptions options, const Clusterer& clusterer, Model init)
    : train_(train),
      test_(test),
      options_(std::move(options)),
      model_(std::move(init)),
      labels_(std::move(labels)) {
  options_.pnal.validate();
  if (train_.empty()) throw Error("no training scenes");
  if (labels_.size() != train_.size()) throw Error("one label store per training scene required");
  num_classes_ = train_.front().num_classes();
  for (const auto& s : train_) {
    if (s.num_classes() != num_classes_) throw Error("training scenes disagree on the class count");
  }
  for (const auto& s : test_) {
    if (s.num_classes() != num_classes_) throw Error("test scenes disagree on the class count");
  }
  if (model_.num_classes() != num_classes_ || model_.input_dim() != kFeatureDim) {
    throw Error("model shape does not match the data");
  }
  loss_ = options_.method == Method::GCE || options_.method == Method::SCE ? options_.baseline_loss : LossKind::ce();
  loss_.validate();

  const auto& cfg = options_.pnal;
  const bool pnal = options_.method == Method::PNAL;
  for (std::size_t s = 0; s < train_.size(); ++s) {
    if (labels_[s].size() != train_[s].size()) throw Error("label store does not match its scene");
    blocks_.push_back(partition_into_blocks(train_[s], cfg.block_size, cfg.stride));
    train_features_.push_back(evaluation_features(train_[s], cfg.block_size, cfg.stride));
    std::vector<std::vector<std::vector<PointIndex>>> per_block;
    if (pnal) {
      per_block.reserve(blocks_.back().size());
      for (const Block& b : blocks_.back()) per_block.push_back(to_scene_indices(clusterer.cluster_block(train_[s], b), b));
      histories_.emplace_back(train_[s].size(), cfg.q);
      recorded_in_epoch_.emplace_back(train_[s].size(), 0);
    }
    clusters_.push_back(std::move(per_block));
  }
  for (const auto& s : test_) test_features_.push_back(evaluation_features(s, cfg.block_size, cfg.stride));
}

bool Trainer::cleaning() const {
  return options_.method == Method::PNAL && epoch_ > options_.pnal.e_warmup;
}

void Trainer::run_epoch() {
  ++epoch_;
  corrections_last_epoch_ = 0;
  Rng rng = make_rng(options_.pnal.seed, static_cast<std::uint64_t>(epoch_));
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    for (std::size_t b = 0; b < blocks_[s].size(); ++b) order.emplace_back(s, b);
  }
  std::shuffle(order.begin(), order.end(), rng);
  for (auto [s, b] : order) process_block(s, b, rng);
}

void Trainer::process_block(std::size_t s, std::size_t b, Rng& rng) {
  const auto& cfg = options_.pnal;
  const Scene& scene = train_[s];
  const Block& block = blocks_[s][b];
  LabelStore& store = labels_[s];

  const auto ids = sample_ids(block, cfg.sample_n, rng);
  const FeatureMatrix features = normalize_features(scene, block, ids);
  const ForwardPass<double> pass = forward_pass(model_, features);

  const bool pnal = options_.method == Method::PNAL;
  if (pnal) {
    // At most one entry per point per epoch, so q counts epochs.
    const auto predicted = argmax_rows(pass.probs);
    auto& seen = recorded_in_epoch_[s];
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto& last = seen[static_cast<std::size_t>(ids[k])];
      if (last == epoch_) continue;
      last = epoch_;
      histories_[s].record(ids[k], predicted[k]);
    }
  }

  std::vector<unsigned char> mask(ids.size(), 1);
  if (cleaning()) {
    const ReliableSet reliable = select_reliable(histories_[s], block.members, cfg.sigma, num_classes_);
    const auto& clusters = clusters_[s][b];
    for (int c : eligible_clusters(clusters, reliable)) {
      const auto& members = clusters[static_cast<std::size_t>(c)];
      const VoteTally tally = tally_votes(members, reliable, num_classes_);
      correct_cluster(store, members, pick_winner(tally, cfg.gamma, rng));
      corrections_last_epoch_ += members.size();
    }
    for (std::size_t k = 0; k < ids.size(); ++k) mask[k] = store.ever_replaced(ids[k]) ? 1 : 0;
  }

  std::vector<ClassId> labels(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) labels[k] = store.label(ids[k]);
  const LossResult<double> res = backward(model_, pass, labels, mask, loss_);
  if (!res.empty_mask) sgd_step(model_, res.grad, cfg.lr, cfg.momentum, momentum_);
}

std::vector<ClassId> Trainer::predict_train(std::size_t scene) const {
  return predict(model_, train_features_[scene]);
}

std::vector<ClassId> Trainer::predict_test(std::size_t scene) const {
  return predict(model_, test_features_[scene]);
}

std::vector<EpochReport> Trainer::evaluate() const {
  Confusion train_conf(num_classes_), test_conf(num_classes_);
  for (std::size_t s = 0; s < train_.size(); ++s) train_conf.add(predict_train(s), train_[s].gt_labels());
  for (std::size_t s = 0; s < test_.size(); ++s) test_conf.add(predict_test(s), test_[s].gt_labels());

  EpochReport train_row;
  train_row.epoch = epoch_;
  train_row.split = "train";
  train_row.oa = train_conf.overall_accuracy();
  train_row.miou = train_conf.mean_iou();
  const CorrectionStats cs = correction_stats(labels_, train_);
  train_row.correction_frac = cs.correction_frac;
  train_row.true_correction_frac = cs.true_correction_frac;
  std::vector<EpochReport> rows{train_row};
  if (!test_.empty()) {
    EpochReport test_row;
    test_row.epoch = epoch_;
    test_row.split = "test";
    test_row.oa = test_conf.overall_accuracy();
    test_row.miou = test_conf.mean_iou();
    rows.push_back(test_row);
  }
  return rows;
}

TrainingResult run_training(std::span<const Scene> train, std::vector<LabelStore> labels,
                            std::span<const Scene> test, const TrainerOptions& options,
                            const Clusterer& clusterer, Model init, const EpochCallback& on_epoch) {
  Trainer trainer(train, std::move(labels), test, options, clusterer, std::move(init));
  TrainingResult result;
  for (int e = 0; e < options.pnal.epochs_total; ++e) {
    const auto start = std::chrono::steady_clock::now();
    trainer.run_epoch();
    auto rows = trainer.evaluate();
    if (options.pnal.record_wall_time) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (auto& r : rows) r.wall_time_s = secs;
    }
    if (on_epoch) on_epoch(trainer, rows);
    result.log.insert(result.log.end(), rows.begin(), rows.end());
  }
  result.model = trainer.model();
  result.labels = trainer.labels();
  return result;
}

EpochReport evaluate_model(const Model& model, std::span<const Scene> scenes, double block_size, double stride,
                           int epoch, const std::string& split) {
  if (scenes.empty()) throw Error("no scenes to evaluate");
  Confusion conf(scenes.front().num_classes());
  for (const Scene& s : scenes) conf.add(predict(model, evaluation_features(s, block_size, stride)), s.gt_labels());
  EpochReport r;
  r.epoch = epoch;
  r.split = split;
  r.oa = conf.overall_accuracy();
  r.miou = conf.mean_iou();
  return r;
}

}  // namespace pnal

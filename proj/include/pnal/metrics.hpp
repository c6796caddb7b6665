#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pnal/label_store.hpp"
#include "pnal/scene.hpp"

namespace pnal {

/// Accumulates gt x pred counts so OA and mIoU can be reduced over scenes.
class Confusion {
 public:
  explicit Confusion(int num_classes);

  void add(std::span<const ClassId> pred, std::span<const ClassId> gt);
  Confusion& operator+=(const Confusion& other);

  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts() const { return counts_; }
  std::int64_t total() const { return counts_.sum(); }

  double overall_accuracy() const;
  /// Mean over classes present in gt or pred of TP / (TP + FP + FN).
  double mean_iou() const;
  /// IoU per class; NaN for a class absent from both gt and pred.
  std::vector<double> per_class_iou() const;

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

double overall_accuracy(std::span<const ClassId> pred, std::span<const ClassId> gt);
double mean_iou(std::span<const ClassId> pred, std::span<const ClassId> gt, int num_classes);

struct CorrectionStats {
  double correction_frac = 0.0;       // |ever replaced| / N
  double true_correction_frac = 0.0;  // replaced and equal to gt / |ever replaced|
  std::size_t points = 0;
  std::size_t replaced = 0;
  std::size_t replaced_correct = 0;
};

CorrectionStats correction_stats(const LabelStore& labels, const Scene& scene);
/// Pooled over all scenes, each point weighted once.
CorrectionStats correction_stats(std::span<const LabelStore> labels, std::span<const Scene> scenes);

struct EpochReport {
  int epoch = 0;
  std::string split;
  double oa = 0.0;
  double miou = 0.0;
  double correction_frac = 0.0;
  double true_correction_frac = 0.0;
  double wall_time_s = 0.0;

  friend bool operator==(const EpochReport&, const EpochReport&) = default;
};

inline constexpr const char* kMetricsHeader =
    "epoch,split,oa,miou,correction_frac,true_correction_frac,wall_time_s";

/// Header line then one row per report, in the given order. Reals use
/// max_digits10.
void write_metrics_csv(std::ostream& out, const std::vector<EpochReport>& rows);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochReport>& rows);
std::vector<EpochReport> read_metrics_csv(std::istream& in);
std::vector<EpochReport> read_metrics_csv(const std::filesystem::path& path);

}  // namespace pnal

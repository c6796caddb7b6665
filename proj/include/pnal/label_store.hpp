#pragma once

#include <span>
#include <vector>

#include "pnal/scene.hpp"

namespace pnal {

/// Mutable training labels of one Scene plus the per-point "ever replaced"
/// flag set by cluster correction. Indexed like the Scene.
class LabelStore {
 public:
  LabelStore() = default;
  /// Starts from the given labels with every ever_replaced flag cleared.
  LabelStore(std::vector<ClassId> labels, int num_classes);

  /// Initialised from the scene's ground truth.
  static LabelStore from_ground_truth(const Scene& scene);

  std::size_t size() const { return labels_.size(); }
  int num_classes() const { return num_classes_; }

  ClassId label(PointIndex i) const { return labels_[i]; }
  bool ever_replaced(PointIndex i) const { return replaced_[i] != 0; }

  /// Overwrites the label and marks the point as replaced, even when the
  /// new label equals the old one.
  void replace(PointIndex i, ClassId label);

  const std::vector<ClassId>& labels() const { return labels_; }
  std::size_t replaced_count() const;

 private:
  std::vector<ClassId> labels_;
  std::vector<unsigned char> replaced_;
  int num_classes_ = 0;
};

}  // namespace pnal

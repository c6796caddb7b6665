#include "pnal/label_store.hpp"

#include <algorithm>
#include <numeric>

namespace pnal {

LabelStore::LabelStore(std::vector<ClassId> labels, int num_classes)
    : labels_(std::move(labels)), replaced_(labels_.size(), 0), num_classes_(num_classes) {
  for (ClassId y : labels_) {
    if (y < 0 || y >= num_classes_) throw Error("label out of range");
  }
}

LabelStore LabelStore::from_ground_truth(const Scene& scene) {
  return LabelStore(scene.gt_labels(), scene.num_classes());
}

void LabelStore::replace(PointIndex i, ClassId label) {
  if (label < 0 || label >= num_classes_) throw Error("label out of range");
  labels_[i] = label;
  replaced_[i] = 1;
}

std::size_t LabelStore::replaced_count() const {
  return static_cast<std::size_t>(std::count(replaced_.begin(), replaced_.end(), 1));
}

}  // namespace pnal

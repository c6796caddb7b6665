#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pnal/types.hpp"

namespace pnal {

struct PointRecord {
  Vec3 position = Vec3::Zero();
  Vec3 color = Vec3::Zero();
  ClassId gt_label = 0;
  std::int64_t instance_id = 0;
  std::int64_t global_id = 0;
};

/// Axis-aligned bounds of a point set.
struct Bounds {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 span() const { return max - min; }
};

/// Labeled point cloud stored column-wise. Immutable once built; the
/// training labels live in a separate LabelStore.
class Scene {
 public:
  Scene() = default;
  Scene(int num_classes, std::vector<std::string> class_names);

  void reserve(std::size_t n);
  void add_point(const PointRecord& p);

  /// Checks every invariant and builds the id index. Throws Error.
  void finalize();

  std::size_t size() const { return gt_labels_.size(); }
  bool empty() const { return gt_labels_.empty(); }
  int num_classes() const { return num_classes_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  PointRecord point(PointIndex i) const;
  Vec3 position(PointIndex i) const { return positions_.row(i).transpose(); }
  Vec3 color(PointIndex i) const { return colors_.row(i).transpose(); }
  ClassId gt_label(PointIndex i) const { return gt_labels_[i]; }
  std::int64_t instance_id(PointIndex i) const { return instance_ids_[i]; }
  std::int64_t global_id(PointIndex i) const { return global_ids_[i]; }

  const Matrix3Xr& positions() const { return positions_; }
  const Matrix3Xr& colors() const { return colors_; }
  const std::vector<ClassId>& gt_labels() const { return gt_labels_; }
  const std::vector<std::int64_t>& instance_ids() const { return instance_ids_; }
  const std::vector<std::int64_t>& global_ids() const { return global_ids_; }

  /// Throws Error for ids not in the scene.
  PointIndex index_of(std::int64_t global_id) const;

  const Bounds& bounds() const { return bounds_; }

  /// Point indices grouped by instance, instances in ascending id order.
  std::vector<std::vector<PointIndex>> instances() const;

  friend bool operator==(const Scene& a, const Scene& b);

 private:
  int num_classes_ = 0;
  std::vector<std::string> class_names_;
  Matrix3Xr positions_;
  Matrix3Xr colors_;
  std::vector<ClassId> gt_labels_;
  std::vector<std::int64_t> instance_ids_;
  std::vector<std::int64_t> global_ids_;
  std::unordered_map<std::int64_t, PointIndex> index_;
  Bounds bounds_;
  std::vector<Vec3> staged_positions_;
  std::vector<Vec3> staged_colors_;
};

}  // namespace pnal

#include "pnal/scene.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace pnal {

Scene::Scene(int num_classes, std::vector<std::string> class_names)
    : num_classes_(num_classes), class_names_(std::move(class_names)) {
  if (num_classes_ <= 0) throw Error("num_classes must be positive");
  class_names_.resize(static_cast<std::size_t>(num_classes_));
  for (int m = 0; m < num_classes_; ++m) {
    if (class_names_[m].empty()) class_names_[m] = "class" + std::to_string(m);
  }
}

void Scene::reserve(std::size_t n) {
  staged_positions_.reserve(n);
  staged_colors_.reserve(n);
  gt_labels_.reserve(n);
  instance_ids_.reserve(n);
  global_ids_.reserve(n);
}

void Scene::add_point(const PointRecord& p) {
  staged_positions_.push_back(p.position);
  staged_colors_.push_back(p.color);
  gt_labels_.push_back(p.gt_label);
  instance_ids_.push_back(p.instance_id);
  global_ids_.push_back(p.global_id);
}

void Scene::finalize() {
  const std::size_t n = gt_labels_.size();
  if (n == 0) throw Error("empty scene");

  if (!staged_positions_.empty()) {
    positions_.resize(static_cast<Eigen::Index>(n), 3);
    colors_.resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
      positions_.row(static_cast<Eigen::Index>(i)) = staged_positions_[i].transpose();
      colors_.row(static_cast<Eigen::Index>(i)) = staged_colors_[i].transpose();
    }
    staged_positions_.clear();
    staged_positions_.shrink_to_fit();
    staged_colors_.clear();
    staged_colors_.shrink_to_fit();
  }

  index_.clear();
  index_.reserve(n);
  std::map<std::int64_t, ClassId> instance_label;
  for (std::size_t i = 0; i < n; ++i) {
    const ClassId y = gt_labels_[i];
    if (y < 0 || y >= num_classes_) throw Error("label out of range");
    if (global_ids_[i] < 0) throw Error("negative global_id");
    if (instance_ids_[i] < 0) throw Error("negative instance_id");
    if (!index_.emplace(global_ids_[i], static_cast<PointIndex>(i)).second) {
      throw Error("duplicate global_id " + std::to_string(global_ids_[i]));
    }
    const auto c = colors_.row(static_cast<Eigen::Index>(i));
    if ((c.array() < 0.0).any() || (c.array() > 1.0).any()) throw Error("color out of [0,1]");
    auto [it, inserted] = instance_label.emplace(instance_ids_[i], y);
    if (!inserted && it->second != y) {
      throw Error("instance " + std::to_string(instance_ids_[i]) + " is not label-homogeneous");
    }
  }
  bounds_.min = positions_.colwise().minCoeff().transpose();
  bounds_.max = positions_.colwise().maxCoeff().transpose();
}

PointRecord Scene::point(PointIndex i) const {
  return PointRecord{position(i), color(i), gt_labels_[i], instance_ids_[i], global_ids_[i]};
}

PointIndex Scene::index_of(std::int64_t global_id) const {
  auto it = index_.find(global_id);
  if (it == index_.end()) throw Error("unknown global_id " + std::to_string(global_id));
  return it->second;
}

std::vector<std::vector<PointIndex>> Scene::instances() const {
  std::map<std::int64_t, std::vector<PointIndex>> groups;
  for (std::size_t i = 0; i < size(); ++i) {
    groups[instance_ids_[i]].push_back(static_cast<PointIndex>(i));
  }
  std::vector<std::vector<PointIndex>> out;
  out.reserve(groups.size());
  for (auto& [id, members] : groups) out.push_back(std::move(members));
  return out;
}

bool operator==(const Scene& a, const Scene& b) {
  return a.num_classes_ == b.num_classes_ && a.class_names_ == b.class_names_ &&
         a.positions_ == b.positions_ && a.colors_ == b.colors_ &&
         a.gt_labels_ == b.gt_labels_ && a.instance_ids_ == b.instance_ids_ &&
         a.global_ids_ == b.global_ids_;
}

}  // namespace pnal

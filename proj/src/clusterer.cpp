#include "pnal/clusterer.hpp"

#include <algorithm>
#include <numeric>

namespace pnal {

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(cluster_of.begin(), cluster_of.end(), kNoise));
}

Matrix3Xr block_unit_positions(const Scene& scene, const Block& block) {
  Matrix3Xr out(static_cast<Eigen::Index>(block.members.size()), 3);
  const Vec3 anchor(block.origin.x(), block.origin.y(), scene.bounds().min.z());
  for (std::size_t r = 0; r < block.members.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = (scene.position(block.members[r]) - anchor).transpose() / block.size;
  }
  return out;
}

void promote_noise(ClusterAssignment& assignment) {
  for (std::size_t i = 0; i < assignment.cluster_of.size(); ++i) {
    if (assignment.cluster_of[i] != kNoise) continue;
    assignment.cluster_of[i] = assignment.k();
    assignment.clusters.push_back({static_cast<PointIndex>(i)});
  }
}

ClusterAssignment DbscanClusterer::cluster_block(const Scene& scene, const Block& block) const {
  if (block.members.empty()) throw Error("cannot cluster an empty block");
  ClusterAssignment a = dbscan(block_unit_positions(scene, block), params_);
  promote_noise(a);
  return a;
}

std::vector<std::vector<PointIndex>> to_scene_indices(const ClusterAssignment& assignment, const Block& block) {
  std::vector<std::vector<PointIndex>> out(assignment.clusters.size());
  for (std::size_t c = 0; c < assignment.clusters.size(); ++c) {
    out[c].reserve(assignment.clusters[c].size());
    for (PointIndex local : assignment.clusters[c]) out[c].push_back(block.members[static_cast<std::size_t>(local)]);
  }
  return out;
}

}  // namespace pnal

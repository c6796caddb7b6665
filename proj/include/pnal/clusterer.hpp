#pragma once

#include <memory>
#include <vector>

#include "pnal/blocks.hpp"
#include "pnal/dbscan.hpp"

namespace pnal {

/// Splits a block into correction units. Implementations must cover every
/// block point exactly once (no kNoise in the result). Indices are local to
/// block.members.
class Clusterer {
 public:
  virtual ~Clusterer() = default;
  virtual ClusterAssignment cluster_block(const Scene& scene, const Block& block) const = 0;
};

/// Block positions relative to (origin, scene floor), all three axes divided
/// by the block size.
Matrix3Xr block_unit_positions(const Scene& scene, const Block& block);

/// Moves every kNoise point into its own singleton cluster, appended in
/// ascending index order after the dense clusters.
void promote_noise(ClusterAssignment& assignment);

class DbscanClusterer final : public Clusterer {
 public:
  explicit DbscanClusterer(DbscanParams params) : params_(params) {}
  ClusterAssignment cluster_block(const Scene& scene, const Block& block) const override;
  const DbscanParams& params() const { return params_; }

 private:
  DbscanParams params_;
};

/// Clusters of a block expressed as scene point indices.
std::vector<std::vector<PointIndex>> to_scene_indices(const ClusterAssignment& assignment, const Block& block);

}  // namespace pnal

#pragma once

#include <random>
#include <vector>

#include "pnal/label_store.hpp"
#include "pnal/scene.hpp"

namespace pnal {

inline constexpr int kFeatureDim = 9;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatureDim>;

/// Square column of a scene, [origin, origin + size) in x and y. The last
/// block along an axis is closed on its upper edge so the scene maximum is
/// covered.
struct Block {
  Vec2 origin = Vec2::Zero();
  double size = 1.0;
  int ix = 0;
  int iy = 0;
  std::vector<PointIndex> members;  // ascending scene indices
};

/// Origin lattice anchored at the scene's minimum (x, y) corner.
struct BlockGrid {
  Vec2 min = Vec2::Zero();
  double size = 1.0;
  double stride = 0.5;
  int nx = 1;
  int ny = 1;

  static BlockGrid for_scene(const Scene& scene, double block_size, double stride);

  Vec2 origin(int ix, int iy) const { return min + Vec2(ix * stride, iy * stride); }
  /// Block whose centre is nearest the point; that block always contains it.
  std::pair<int, int> home_cell(const Vec3& p) const;
};

/// Non-empty blocks ordered by (ix, iy). Throws Error on an empty scene, a
/// non-positive size/stride, or stride > block_size (which would leave gaps).
std::vector<Block> partition_into_blocks(const Scene& scene, double block_size, double stride);

struct SampledBatch {
  std::vector<PointIndex> ids;
  FeatureMatrix features;
  std::vector<ClassId> labels;
};

/// Draws n member ids: without replacement when the block holds at least n
/// points, otherwise every member once plus a with-replacement top-up.
std::vector<PointIndex> sample_ids(const Block& block, std::size_t n, std::mt19937_64& rng);

SampledBatch sample_block(const Scene& scene, const Block& block, const LabelStore& labels,
                          std::size_t n, std::mt19937_64& rng);

/// Columns: block-relative xyz (x, y over block size, z over scene height),
/// rgb, scene-normalized xyz. A zero-span axis normalizes to 0.
FeatureMatrix normalize_features(const Scene& scene, const Block& block,
                                 const std::vector<PointIndex>& ids);

/// Features of every scene point, each taken relative to its home block.
FeatureMatrix evaluation_features(const Scene& scene, double block_size, double stride);

}  // namespace pnal

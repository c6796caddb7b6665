#include "pnal/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pnal {
namespace {

constexpr double kGridTol = 1e-9;

int cells_along(double span, double size, double stride) {
  if (span <= size) return 1;
  return static_cast<int>(std::ceil((span - size) / stride - kGridTol)) + 1;
}

// Lattice cells along one axis whose interval contains rel.
void cells_containing(double rel, double size, double stride, int count, std::vector<int>& out) {
  out.clear();
  int lo = static_cast<int>(std::floor((rel - size) / stride));
  int hi = static_cast<int>(std::floor(rel / stride));
  lo = std::max(lo, 0);
  hi = std::min(hi, count - 1);
  for (int i = lo; i <= hi; ++i) {
    const double start = i * stride;
    const bool last = i == count - 1;
    if (rel >= start - kGridTol && (rel < start + size || (last && rel <= start + size + kGridTol))) {
      out.push_back(i);
    }
  }
  // Rounding at the far edge; the last cell is closed there by construction.
  if (out.empty()) out.push_back(std::clamp(hi, 0, count - 1));
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

BlockGrid BlockGrid::for_scene(const Scene& scene, double block_size, double stride) {
  if (scene.empty()) throw Error("empty scene");
  if (!(block_size > 0.0) || !(stride > 0.0)) throw Error("block size and stride must be positive");
  if (stride > block_size) throw Error("stride larger than block size leaves uncovered gaps");
  BlockGrid g;
  g.min = scene.bounds().min.head<2>();
  g.size = block_size;
  g.stride = stride;
  const Vec3 span = scene.bounds().span();
  g.nx = cells_along(span.x(), block_size, stride);
  g.ny = cells_along(span.y(), block_size, stride);
  return g;
}

std::pair<int, int> BlockGrid::home_cell(const Vec3& p) const {
  auto axis = [&](double rel, int count) {
    const int i = static_cast<int>(std::lround((rel - 0.5 * size) / stride));
    return std::clamp(i, 0, count - 1);
  };
  return {axis(p.x() - min.x(), nx), axis(p.y() - min.y(), ny)};
}

std::vector<Block> partition_into_blocks(const Scene& scene, double block_size, double stride) {
  const BlockGrid grid = BlockGrid::for_scene(scene, block_size, stride);
  std::map<std::pair<int, int>, std::vector<PointIndex>> cells;
  std::vector<int> xs, ys;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const Vec3 p = scene.position(static_cast<PointIndex>(i));
    cells_containing(p.x() - grid.min.x(), block_size, stride, grid.nx, xs);
    cells_containing(p.y() - grid.min.y(), block_size, stride, grid.ny, ys);
    for (int ix : xs) {
      for (int iy : ys) cells[{ix, iy}].push_back(static_cast<PointIndex>(i));
    }
  }
  std::vector<Block> blocks;
  blocks.reserve(cells.size());
  for (auto& [cell, members] : cells) {
    Block b;
    b.ix = cell.first;
    b.iy = cell.second;
    b.origin = grid.origin(b.ix, b.iy);
    b.size = block_size;
    b.members = std::move(members);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

std::vector<PointIndex> sample_ids(const Block& block, std::size_t n, std::mt19937_64& rng) {
  if (block.members.empty()) throw Error("cannot sample an empty block");
  if (n == 0) throw Error("sample size must be positive");
  std::vector<PointIndex> pool = block.members;
  std::sort(pool.begin(), pool.end());
  if (pool.size() >= n) {
    // Partial Fisher-Yates: the first n slots become the draw.
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(n);
    return pool;
  }
  std::vector<PointIndex> out = pool;
  out.reserve(n);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  while (out.size() < n) out.push_back(pool[pick(rng)]);
  return out;
}

SampledBatch sample_block(const Scene& scene, const Block& block, const LabelStore& labels,
                          std::size_t n, std::mt19937_64& rng) {
  SampledBatch batch;
  batch.ids = sample_ids(block, n, rng);
  batch.features = normalize_features(scene, block, batch.ids);
  batch.labels.reserve(batch.ids.size());
  for (PointIndex id : batch.ids) batch.labels.push_back(labels.label(id));
  return batch;
}

namespace {

void fill_row(const Scene& scene, const Vec2& origin, double size, PointIndex id,
              FeatureMatrix& out, Eigen::Index row) {
  const Bounds& b = scene.bounds();
  const Vec3 span = b.span();
  const Vec3 p = scene.position(id);
  out(row, 0) = (p.x() - origin.x()) / size;
  out(row, 1) = (p.y() - origin.y()) / size;
  out(row, 2) = safe_ratio(p.z() - b.min.z(), span.z());
  out.block<1, 3>(row, 3) = scene.colors().row(id);
  for (int a = 0; a < 3; ++a) out(row, 6 + a) = safe_ratio(p[a] - b.min[a], span[a]);
}

}  // namespace

FeatureMatrix normalize_features(const Scene& scene, const Block& block,
                                 const std::vector<PointIndex>& ids) {
  FeatureMatrix out(static_cast<Eigen::Index>(ids.size()), kFeatureDim);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    fill_row(scene, block.origin, block.size, ids[r], out, static_cast<Eigen::Index>(r));
  }
  return out;
}

FeatureMatrix evaluation_features(const Scene& scene, double block_size, double stride) {
  const BlockGrid grid = BlockGrid::for_scene(scene, block_size, stride);
  FeatureMatrix out(static_cast<Eigen::Index>(scene.size()), kFeatureDim);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const auto id = static_cast<PointIndex>(i);
    const auto [ix, iy] = grid.home_cell(scene.position(id));
    fill_row(scene, grid.origin(ix, iy), block_size, id, out, static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace pnal

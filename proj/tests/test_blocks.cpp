#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "pnal/blocks.hpp"
#include "pnal/random.hpp"

#include <numeric>

using namespace pnal;

namespace {

Scene uniform_scene(double sx, double sy, double sz, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scene s(2, testing_helpers::class_names(2));
  for (int i = 0; i < n; ++i) {
    PointRecord p;
    p.position = Vec3(sx * u(rng), sy * u(rng), sz * u(rng));
    p.color = Vec3(u(rng), u(rng), u(rng));
    p.gt_label = i % 2;
    p.instance_id = i;
    p.global_id = i;
    s.add_point(p);
  }
  // Pin the extents exactly.
  PointRecord lo;
  lo.gt_label = 0;
  lo.instance_id = n;
  lo.global_id = n;
  lo.color = Vec3::Zero();
  s.add_point(lo);
  PointRecord hi = lo;
  hi.position = Vec3(sx, sy, sz);
  hi.instance_id = hi.global_id = n + 1;
  s.add_point(hi);
  s.finalize();
  return s;
}

Block block_of(std::vector<PointIndex> members) {
  Block b;
  b.members = std::move(members);
  return b;
}

}  // namespace

TEST(Blocks, GridEnumerationExample) {
  const Scene s = uniform_scene(2.0, 1.5, 1.0, 4000, 3);
  const auto blocks = partition_into_blocks(s, 1.0, 0.5);
  ASSERT_EQ(blocks.size(), 6u);
  std::set<std::pair<double, double>> origins;
  for (const auto& b : blocks) origins.insert({b.origin.x(), b.origin.y()});
  const std::set<std::pair<double, double>> expected{{0, 0}, {0, 0.5}, {0.5, 0}, {0.5, 0.5}, {1.0, 0}, {1.0, 0.5}};
  EXPECT_EQ(origins, expected);
}

TEST(Blocks, NonOverlappingTilingCoversOnce) {
  const Scene s = uniform_scene(3.3, 2.1, 1.0, 3000, 4);
  std::vector<int> hits(s.size(), 0);
  for (const auto& b : partition_into_blocks(s, 0.5, 0.5))
    for (PointIndex i : b.members) ++hits[static_cast<std::size_t>(i)];
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST(Blocks, SmallSceneGivesOneBlock) {
  const Scene s = uniform_scene(0.4, 0.3, 1.0, 50, 5);
  const auto blocks = partition_into_blocks(s, 1.0, 0.5);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].members.size(), s.size());
}

TEST(Blocks, RejectsBadGeometry) {
  const Scene s = uniform_scene(1, 1, 1, 10, 6);
  EXPECT_THROW(partition_into_blocks(s, 0.0, 0.5), Error);
  EXPECT_THROW(partition_into_blocks(s, 1.0, 0.0), Error);
  EXPECT_THROW(partition_into_blocks(s, 0.5, 1.0), Error);
}

TEST(Blocks, CoverPropertyOnRandomScenes) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ext(0.3, 4.0), size(0.4, 1.5), frac(0.3, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Scene s = uniform_scene(ext(gen), ext(gen), 1.0, 500, gen());
    const double bs = size(gen);
    const double st = bs * frac(gen);
    std::vector<char> seen(s.size(), 0);
    for (const auto& b : partition_into_blocks(s, bs, st)) {
      EXPECT_TRUE(std::is_sorted(b.members.begin(), b.members.end()));
      for (PointIndex i : b.members) seen[static_cast<std::size_t>(i)] = 1;
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](char c) { return c; })) << "trial " << trial;
  }
}

TEST(Blocks, HomeCellContainsPoint) {
  const Scene s = uniform_scene(3.7, 2.2, 1.0, 800, 8);
  const auto grid = BlockGrid::for_scene(s, 1.0, 0.5);
  for (PointIndex i = 0; i < static_cast<PointIndex>(s.size()); ++i) {
    const auto [ix, iy] = grid.home_cell(s.position(i));
    const Vec2 o = grid.origin(ix, iy);
    EXPECT_GE(s.position(i).x(), o.x() - 1e-12);
    EXPECT_LE(s.position(i).x(), o.x() + 1.0 + 1e-12);
    EXPECT_GE(s.position(i).y(), o.y() - 1e-12);
    EXPECT_LE(s.position(i).y(), o.y() + 1.0 + 1e-12);
  }
}

TEST(Sampling, LargeBlockDrawsDistinct) {
  std::vector<PointIndex> m(5000);
  std::iota(m.begin(), m.end(), 0);
  Rng rng(1);
  auto ids = sample_ids(block_of(m), 4096, rng);
  ASSERT_EQ(ids.size(), 4096u);
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());
}

TEST(Sampling, ExactSizeIsWholeBlock) {
  std::vector<PointIndex> m{3, 8, 9, 12, 20, 21, 22, 30, 31, 40};
  Rng rng(2);
  auto ids = sample_ids(block_of(m), 10, rng);
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, m);
}

TEST(Sampling, SmallBlockTopsUp) {
  Rng rng(3);
  const auto ids = sample_ids(block_of({4, 5, 6}), 6, rng);
  ASSERT_EQ(ids.size(), 6u);
  for (PointIndex p : {4, 5, 6}) EXPECT_GE(std::count(ids.begin(), ids.end(), p), 1);
}

TEST(Sampling, PermutationStable) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PointIndex> m(100 + trial * 7);
    std::iota(m.begin(), m.end(), 0);
    std::vector<PointIndex> shuffled = m;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    for (std::size_t n : {std::size_t{50}, m.size() + 13}) {
      Rng a(trial), b(trial);
      auto x = sample_ids(block_of(m), n, a);
      auto y = sample_ids(block_of(shuffled), n, b);
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      EXPECT_EQ(x, y);
    }
  }
}

TEST(Features, HandExamples) {
  Scene s(2, testing_helpers::class_names(2));
  auto add = [&](std::int64_t gid, Vec3 pos, Vec3 rgb) {
    PointRecord p;
    p.position = pos;
    p.color = rgb;
    p.instance_id = p.global_id = gid;
    s.add_point(p);
  };
  add(0, Vec3(0, 0, 0), Vec3(1, 1, 1));
  add(1, Vec3(1, 1, 1), Vec3(0.2, 0.3, 0.4));
  add(2, Vec3(2, 2, 2), Vec3(0, 0, 0));
  s.finalize();
  const auto blocks = partition_into_blocks(s, 1.0, 0.5);
  const FeatureMatrix f = normalize_features(s, blocks.front(), {0, 1});
  EXPECT_EQ(f.row(0).head<3>(), Eigen::RowVector3d(0, 0, 0));
  EXPECT_EQ(f.row(0).segment<3>(3), Eigen::RowVector3d(1, 1, 1));
  EXPECT_DOUBLE_EQ(f(1, 6), 0.5);
  EXPECT_DOUBLE_EQ(f(1, 7), 0.5);
  EXPECT_DOUBLE_EQ(f(1, 8), 0.5);
}

TEST(Features, EntriesInUnitRange) {
  const Scene s = uniform_scene(3.1, 2.4, 2.0, 1500, 9);
  for (const auto& b : partition_into_blocks(s, 1.0, 0.5)) {
    const FeatureMatrix f = normalize_features(s, b, b.members);
    EXPECT_GE(f.minCoeff(), 0.0);
    EXPECT_LE(f.maxCoeff(), 1.0);
  }
  const FeatureMatrix all = evaluation_features(s, 1.0, 0.5);
  EXPECT_EQ(all.rows(), static_cast<Eigen::Index>(s.size()));
  EXPECT_GE(all.minCoeff(), 0.0);
  EXPECT_LE(all.maxCoeff(), 1.0);
}

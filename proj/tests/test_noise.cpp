#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "pnal/noise.hpp"
#include "pnal/synth.hpp"

using namespace pnal;
using testing_helpers::grid_scene;

namespace {

bool homogeneous(const Scene& s, const LabelStore& l) {
  for (const auto& members : s.instances())
    for (PointIndex i : members)
      if (l.label(i) != l.label(members.front())) return false;
  return true;
}

}  // namespace

TEST(SymmetricNoise, ZeroIsIdentity) {
  const Scene s = grid_scene(6, 50, 10);
  Rng rng(1);
  EXPECT_EQ(inject_symmetric(s, 0.0, rng).labels(), s.gt_labels());
}

TEST(SymmetricNoise, OneFlipsEverything) {
  const Scene s = grid_scene(6, 50, 10);
  Rng rng(2);
  const LabelStore l = inject_symmetric(s, 1.0, rng);
  for (PointIndex i = 0; i < static_cast<PointIndex>(s.size()); ++i) EXPECT_NE(l.label(i), s.gt_label(i));
  EXPECT_TRUE(homogeneous(s, l));
}

TEST(SymmetricNoise, BinomialCalibration) {
  const Scene s = grid_scene(6, 1000, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const LabelStore l = inject_symmetric(s, 0.6, rng);
    const NoiseStats st = measure_noise(s, l);
    EXPECT_EQ(st.instances, 1000u);
    EXPECT_LE(std::abs(static_cast<double>(st.noisy_instances) - 600.0), 3 * std::sqrt(1000 * 0.6 * 0.4));
    EXPECT_TRUE(homogeneous(s, l));
  }
}

TEST(SymmetricNoise, PointRateTracksInstanceRate) {
  const Scene s = grid_scene(6, 2000, 10);
  Rng rng(9);
  const NoiseStats st = measure_noise(s, inject_symmetric(s, 0.6, rng));
  EXPECT_NEAR(st.point_rate, st.instance_rate, 1e-12);  // equal instance sizes
}

TEST(SymmetricNoise, TargetsUniform) {
  const Scene s = grid_scene(6, 6000, 1);
  Rng rng(4);
  const NoiseStats st = measure_noise(s, inject_symmetric(s, 1.0, rng));
  for (int g = 0; g < 6; ++g) {
    const double n = st.confusion.row(g).sum();
    for (int t = 0; t < 6; ++t) {
      if (t == g) {
        EXPECT_EQ(st.confusion(g, t), 0);
        continue;
      }
      const double p = 0.2;
      EXPECT_LE(std::abs(st.confusion(g, t) - n * p), 3 * std::sqrt(n * p * (1 - p)));
    }
  }
}

TEST(AsymmetricNoise, IdentityAtZero) {
  const Scene s = grid_scene(6, 60, 5);
  Rng rng(1);
  const auto out = inject_asymmetric(std::span<const Scene>(&s, 1), 0.0, 0.0, {{0, 1}}, rng);
  EXPECT_EQ(out.labels[0].labels(), s.gt_labels());
}

TEST(AsymmetricNoise, ForcedSwap) {
  const Scene s = grid_scene(6, 60, 5);
  Rng rng(2);
  // Paired instances are a third of the total; tau = 1/3 leaves the others clean.
  const auto out = inject_asymmetric(std::span<const Scene>(&s, 1), 1.0 / 3.0, 1.0, {{0, 1}}, rng);
  const LabelStore& l = out.labels[0];
  for (PointIndex i = 0; i < static_cast<PointIndex>(s.size()); ++i) {
    const ClassId g = s.gt_label(i);
    if (g == 0) EXPECT_EQ(l.label(i), 1);
    else if (g == 1) EXPECT_EQ(l.label(i), 0);
    else EXPECT_EQ(l.label(i), g);
  }
  EXPECT_NEAR(out.unpaired_rate, 0.0, 1e-12);
}

TEST(AsymmetricNoise, ClampsWithWarning) {
  const Scene s = grid_scene(6, 60, 5);
  Rng rng(3);
  const auto out = inject_asymmetric(std::span<const Scene>(&s, 1), 0.9, 0.0, {{0, 1}, {2, 3}}, rng);
  EXPECT_TRUE(out.clamped);
  EXPECT_FALSE(out.warnings.empty());
  EXPECT_DOUBLE_EQ(out.unpaired_rate, 1.0);
}

TEST(AsymmetricNoise, OverallRateOnBenchmark) {
  const Benchmark bench = default_benchmark(3);
  // Tables and chairs together hold about half of the benchmark instances.
  const std::vector<std::pair<ClassId, ClassId>> pairs{{3, 4}};
  std::size_t paired = 0, total = 0;
  for (const Scene& s : bench.train)
    for (const auto& m : s.instances()) {
      const ClassId g = s.gt_label(m.front());
      paired += g == 3 || g == 4;
      ++total;
    }
  const double share = static_cast<double>(paired) / static_cast<double>(total);
  EXPECT_GT(share, 0.3);
  EXPECT_LT(share, 0.7);

  Rng rng(17);
  const auto out = inject_asymmetric(bench.train, 0.6, 0.4, pairs, rng);
  NoiseStats st;
  for (std::size_t i = 0; i < bench.train.size(); ++i) {
    st += measure_noise(bench.train[i], out.labels[i]);
    EXPECT_TRUE(homogeneous(bench.train[i], out.labels[i]));
  }
  const double r = out.unpaired_rate;
  const double var = static_cast<double>(paired) * 0.4 * 0.6 + static_cast<double>(total - paired) * r * (1 - r);
  EXPECT_LE(std::abs(static_cast<double>(st.noisy_instances) - 0.6 * static_cast<double>(total)), 3 * std::sqrt(var));
  // Flips out of the paired classes land only on the partner.
  for (int t = 0; t < 6; ++t) {
    if (t != 3 && t != 4) {
      EXPECT_EQ(st.confusion(3, t), 0);
      EXPECT_EQ(st.confusion(4, t), 0);
    }
  }
}

TEST(NoiseConfig, Validation) {
  EXPECT_THROW(validate(NoiseConfig{NoiseKind::Symmetric, 1.5, 0, {}, 0}, 6), Error);
  EXPECT_THROW(validate(NoiseConfig{NoiseKind::Asymmetric, 0.5, 0.5, {{0, 0}}, 0}, 6), Error);
  EXPECT_THROW(validate(NoiseConfig{NoiseKind::Asymmetric, 0.5, 0.5, {{0, 1}, {1, 2}}, 0}, 6), Error);
  EXPECT_THROW(validate(NoiseConfig{NoiseKind::Asymmetric, 0.5, 0.5, {{0, 6}}, 0}, 6), Error);
  EXPECT_NO_THROW(validate(NoiseConfig{NoiseKind::Asymmetric, 0.5, 0.5, {{0, 1}, {2, 3}}, 0}, 6));
}

TEST(MeasureNoise, HandCount) {
  const Scene s = grid_scene(3, 10, 10);
  LabelStore l = LabelStore::from_ground_truth(s);
  NoiseStats clean = measure_noise(s, l);
  EXPECT_EQ(clean.instance_rate, 0.0);
  EXPECT_EQ(clean.point_rate, 0.0);
  EXPECT_EQ(clean.confusion.trace(), 100);

  const auto groups = s.instances();
  for (PointIndex i : groups[4]) l.replace(i, 0);  // instance 4 has gt 1
  const NoiseStats st = measure_noise(s, l);
  EXPECT_DOUBLE_EQ(st.instance_rate, 0.1);
  EXPECT_DOUBLE_EQ(st.point_rate, 0.1);
  EXPECT_EQ(st.confusion(1, 0), 10);
  EXPECT_EQ(st.confusion.sum() - st.confusion.trace(), 10);
}

#include "pnal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "pnal/random.hpp"

namespace pnal {
namespace {

double surface_area(const InstanceSpec& inst) {
  const Vec3& h = inst.half_extent;
  switch (inst.shape) {
    case Shape::Plane: {
      double a = 1.0;
      int nonzero = 0;
      for (int k = 0; k < 3; ++k) {
        if (h[k] > 0.0) {
          a *= 2.0 * h[k];
          ++nonzero;
        }
      }
      return nonzero == 2 ? a : 0.0;
    }
    case Shape::Box:
      return 8.0 * (h.x() * h.y() + h.y() * h.z() + h.z() * h.x());
    case Shape::Sphere:
      return 4.0 * std::numbers::pi * h.x() * h.x();
  }
  return 0.0;
}

// Unrotated offset from the centre of a uniform surface sample.
Vec3 sample_surface(const InstanceSpec& inst, Rng& rng) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const Vec3& h = inst.half_extent;
  switch (inst.shape) {
    case Shape::Plane:
      return Vec3(sym(rng) * h.x(), sym(rng) * h.y(), sym(rng) * h.z());
    case Shape::Box: {
      // Face pairs weighted by area: normal x, y, z.
      const double ax = h.y() * h.z(), ay = h.x() * h.z(), az = h.x() * h.y();
      std::uniform_real_distribution<double> u(0.0, ax + ay + az);
      const double r = u(rng);
      const int axis = r < ax ? 0 : (r < ax + ay ? 1 : 2);
      Vec3 p(sym(rng) * h.x(), sym(rng) * h.y(), sym(rng) * h.z());
      std::bernoulli_distribution side(0.5);
      p[axis] = side(rng) ? h[axis] : -h[axis];
      return p;
    }
    case Shape::Sphere: {
      std::normal_distribution<double> g(0.0, 1.0);
      Vec3 d(g(rng), g(rng), g(rng));
      while (d.squaredNorm() < 1e-12) d = Vec3(g(rng), g(rng), g(rng));
      return d.normalized() * h.x();
    }
  }
  return Vec3::Zero();
}

}  // namespace

void validate(const SceneSpec& spec) {
  if (spec.num_classes < 2) throw Error("scene spec needs at least 2 classes");
  if (spec.instances.empty()) throw Error("scene spec has no instances");
  if (static_cast<int>(spec.colors.class_means.size()) != spec.num_classes) {
    throw Error("color model must give one mean per class");
  }
  for (const auto& inst : spec.instances) {
    if (inst.cls < 0 || inst.cls >= spec.num_classes) throw Error("instance class out of range");
    if (inst.num_points < 10) throw Error("instances need at least 10 points");
    if ((inst.half_extent.array() < 0.0).any()) throw Error("negative half extent");
    if (surface_area(inst) <= 0.0) throw Error("instance has a degenerate surface");
  }
}

Scene generate_scene(const SceneSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  std::normal_distribution<double> jitter(0.0, spec.jitter_stddev);
  std::normal_distribution<double> color_noise(0.0, spec.colors.noise_stddev);
  std::normal_distribution<double> tint_noise(0.0, spec.colors.instance_stddev);

  std::size_t total = 0;
  for (const auto& inst : spec.instances) total += static_cast<std::size_t>(inst.num_points);

  Scene scene(spec.num_classes, spec.class_names);
  scene.reserve(total);
  std::int64_t gid = 0;
  for (std::size_t k = 0; k < spec.instances.size(); ++k) {
    const InstanceSpec& inst = spec.instances[k];
    Vec3 tint = Vec3::Zero();
    if (spec.colors.instance_stddev > 0.0) tint = Vec3(tint_noise(rng), tint_noise(rng), tint_noise(rng));
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(inst.yaw, Vec3::UnitZ()).toRotationMatrix();
    const Vec3 base = spec.colors.class_means[static_cast<std::size_t>(inst.cls)] + tint;
    for (int j = 0; j < inst.num_points; ++j) {
      PointRecord p;
      p.position = inst.center + rot * sample_surface(inst, rng);
      if (spec.jitter_stddev > 0.0) p.position += Vec3(jitter(rng), jitter(rng), jitter(rng));
      p.color = base;
      if (spec.colors.noise_stddev > 0.0) p.color += Vec3(color_noise(rng), color_noise(rng), color_noise(rng));
      p.color = p.color.cwiseMax(0.0).cwiseMin(1.0);
      p.gt_label = inst.cls;
      p.instance_id = static_cast<std::int64_t>(k);
      p.global_id = gid++;
      scene.add_point(p);
    }
  }
  scene.finalize();
  return scene;
}

const std::vector<Vec3>& benchmark_class_colors() {
  static const std::vector<Vec3> colors{
      Vec3(0.60, 0.40, 0.20),  // floor
      Vec3(0.90, 0.90, 0.80),  // wall
      Vec3(0.45, 0.70, 0.95),  // ceiling
      Vec3(0.25, 0.10, 0.05),  // table
      Vec3(0.15, 0.55, 0.30),  // chair
      Vec3(0.85, 0.20, 0.60),  // clutter
  };
  return colors;
}

SceneSpec benchmark_scene_spec(std::uint64_t seed, const BenchmarkOptions& options) {
  Rng rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  SceneSpec spec;
  spec.num_classes = 6;
  spec.class_names = benchmark_class_names();
  spec.colors.class_means = benchmark_class_colors();
  spec.colors.noise_stddev = options.color_noise;
  spec.colors.instance_stddev = options.instance_tint;
  spec.jitter_stddev = options.jitter;
  spec.seed = derive_seed(seed, 1);

  const double sx = uniform(3.0, 5.0), sy = uniform(3.0, 5.0), sz = uniform(2.4, 3.0);
  spec.room_extent = Vec3(sx, sy, sz);
  constexpr double gap = 0.05;

  auto add = [&](ClassId cls, Shape shape, Vec3 center, Vec3 half, double yaw, double density) {
    InstanceSpec inst{cls, shape, center, half, yaw, 10};
    inst.num_points = std::max(10, static_cast<int>(std::lround(surface_area(inst) * density)));
    spec.instances.push_back(inst);
  };
  const double ds = options.structure_density, dobj = options.object_density;
  add(0, Shape::Plane, Vec3(sx / 2, sy / 2, 0.0), Vec3(sx / 2 - gap, sy / 2 - gap, 0.0), 0.0, ds);
  add(2, Shape::Plane, Vec3(sx / 2, sy / 2, sz), Vec3(sx / 2 - gap, sy / 2 - gap, 0.0), 0.0, ds);
  add(1, Shape::Plane, Vec3(0.0, sy / 2, sz / 2), Vec3(0.0, sy / 2 - 2 * gap, sz / 2 - gap), 0.0, ds);
  add(1, Shape::Plane, Vec3(sx, sy / 2, sz / 2), Vec3(0.0, sy / 2 - 2 * gap, sz / 2 - gap), 0.0, ds);
  add(1, Shape::Plane, Vec3(sx / 2, 0.0, sz / 2), Vec3(sx / 2 - 2 * gap, 0.0, sz / 2 - gap), 0.0, ds);
  add(1, Shape::Plane, Vec3(sx / 2, sy, sz / 2), Vec3(sx / 2 - 2 * gap, 0.0, sz / 2 - gap), 0.0, ds);

  const int furniture = uniform_int(14, 34);
  const int tables = uniform_int(1, 4);
  const int chairs = std::max(1, (furniture - tables) / 2 + uniform_int(-2, 2));
  const int clutter = std::max(1, furniture - tables - chairs);
  const double margin = 0.6;
  auto floor_xy = [&] { return Vec2(uniform(margin, sx - margin), uniform(margin, sy - margin)); };

  for (int t = 0; t < tables; ++t) {
    const Vec2 c = floor_xy();
    add(3, Shape::Box, Vec3(c.x(), c.y(), uniform(0.70, 0.78)),
        Vec3(uniform(0.35, 0.70), uniform(0.30, 0.50), 0.025), uniform(0.0, std::numbers::pi), dobj);
  }
  for (int k = 0; k < chairs; ++k) {
    const Vec2 c = floor_xy();
    const double h = uniform(0.20, 0.25);
    add(4, Shape::Box, Vec3(c.x(), c.y(), h + gap), Vec3(uniform(0.18, 0.24), uniform(0.18, 0.24), h),
        uniform(0.0, std::numbers::pi), dobj);
  }
  for (int k = 0; k < clutter; ++k) {
    const Vec2 c = floor_xy();
    const double r = uniform(0.15, 0.30);
    if (uniform(0.0, 1.0) < 0.5) {
      add(5, Shape::Sphere, Vec3(c.x(), c.y(), uniform(r + gap, 1.8)), Vec3(r, r, r), 0.0, dobj);
    } else {
      add(5, Shape::Box, Vec3(c.x(), c.y(), uniform(r + gap, 1.8)), Vec3(r, 0.7 * r, 0.5 * r),
          uniform(0.0, std::numbers::pi), dobj);
    }
  }
  return spec;
}

Benchmark default_benchmark(std::uint64_t seed, const BenchmarkOptions& options) {
  Benchmark bench;
  bench.train.reserve(static_cast<std::size_t>(options.train_scenes));
  bench.test.reserve(static_cast<std::size_t>(options.test_scenes));
  std::uint64_t stream = 0;
  for (int i = 0; i < options.train_scenes; ++i) {
    bench.train.push_back(generate_scene(benchmark_scene_spec(derive_seed(seed, stream++), options)));
  }
  for (int i = 0; i < options.test_scenes; ++i) {
    bench.test.push_back(generate_scene(benchmark_scene_spec(derive_seed(seed, stream++), options)));
  }
  return bench;
}

}  // namespace pnal

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnal/scene.hpp"

namespace pnal {

enum class Shape { Plane, Box, Sphere };

/// One object. Axis-aligned before the yaw rotation about the centre.
/// Plane: exactly one zero half-extent picks the normal axis.
/// Sphere: radius is half_extent.x().
struct InstanceSpec {
  ClassId cls = 0;
  Shape shape = Shape::Plane;
  Vec3 center = Vec3::Zero();
  Vec3 half_extent = Vec3::Zero();
  double yaw = 0.0;
  int num_points = 10;
};

struct ColorModel {
  std::vector<Vec3> class_means;
  double noise_stddev = 0.04;     // per point
  double instance_stddev = 0.0;   // per-instance tint shared by all its points
};

struct SceneSpec {
  Vec3 room_extent = Vec3(4.0, 4.0, 3.0);
  int num_classes = 2;
  std::vector<std::string> class_names;
  std::vector<InstanceSpec> instances;
  ColorModel colors;
  double jitter_stddev = 0.01;
  std::uint64_t seed = 0;
};

/// Throws Error when the spec violates its invariants.
void validate(const SceneSpec& spec);

/// Samples every instance's surface with Gaussian jitter. Instance ids follow
/// the spec order, global ids are 0..N-1. Deterministic in spec.seed.
Scene generate_scene(const SceneSpec& spec);

struct Benchmark {
  std::vector<Scene> train;
  std::vector<Scene> test;
};

/// Knobs of the procedural room family; defaults are the standard benchmark.
struct BenchmarkOptions {
  int train_scenes = 40;
  int test_scenes = 10;
  double structure_density = 30.0;  // points per m^2 on floor, walls, ceiling
  double object_density = 100.0;    // points per m^2 on furniture
  double color_noise = 0.04;
  double instance_tint = 0.12;
  double jitter = 0.01;
};

inline const std::vector<std::string>& benchmark_class_names() {
  static const std::vector<std::string> names{"floor", "wall", "ceiling", "table", "chair", "clutter"};
  return names;
}

/// Class mean colours of the benchmark; pairwise rgb distance >= 0.25.
const std::vector<Vec3>& benchmark_class_colors();

/// Room spec for one benchmark scene: floor, ceiling, four walls and 14-34
/// furniture items (20-40 instances in total).
SceneSpec benchmark_scene_spec(std::uint64_t seed, const BenchmarkOptions& options = {});

/// 40 train + 10 test rooms with six classes; every class occurs in every room.
Benchmark default_benchmark(std::uint64_t seed, const BenchmarkOptions& options = {});

}  // namespace pnal

#pragma once
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pnal/scene.hpp"

namespace testing_helpers {

inline std::vector<std::string> class_names(int m) {
  std::vector<std::string> out;
  for (int i = 0; i < m; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

// Grid of points, one instance per row of `per_instance` consecutive points.
inline pnal::Scene grid_scene(int num_classes, int instances, int per_instance, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pnal::Scene s(num_classes, class_names(num_classes));
  std::int64_t gid = 0;
  for (int inst = 0; inst < instances; ++inst) {
    for (int k = 0; k < per_instance; ++k) {
      pnal::PointRecord p;
      p.position = pnal::Vec3(2.0 * u(rng), 1.5 * u(rng), u(rng));
      p.color = pnal::Vec3(u(rng), u(rng), u(rng));
      p.gt_label = inst % num_classes;
      p.instance_id = inst;
      p.global_id = gid++;
      s.add_point(p);
    }
  }
  s.finalize();
  return s;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pnal_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_helpers

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pnal/label_store.hpp"
#include "pnal/random.hpp"
#include "pnal/scene.hpp"

namespace pnal {

enum class NoiseKind { Symmetric, Asymmetric };

struct NoiseConfig {
  NoiseKind kind = NoiseKind::Symmetric;
  double tau = 0.0;
  double tau_pair = 0.0;  // asymmetric only
  std::vector<std::pair<ClassId, ClassId>> pairs;
  std::uint64_t seed = 0;
};

/// Throws Error for rates outside [0,1] or pairs that overlap or repeat a class.
void validate(const NoiseConfig& config, int num_classes);

// All corruption is instance-level: one draw per instance, applied to every
// point of that instance. Instances are visited in ascending id order.

/// With probability tau an instance moves to one of the other M-1 classes,
/// chosen uniformly.
LabelStore inject_symmetric(const Scene& scene, double tau, Rng& rng);
std::vector<LabelStore> inject_symmetric(std::span<const Scene> scenes, double tau, Rng& rng);

struct AsymmetricOutcome {
  std::vector<LabelStore> labels;
  /// Symmetric rate applied to instances of unpaired classes, solved so the
  /// expected overall instance noise rate is tau.
  double unpaired_rate = 0.0;
  bool clamped = false;
  std::vector<std::string> warnings;
};

/// Paired classes swap to their partner with probability tau_pair; the rest
/// follow the symmetric rule at the solved rate (clamped to [0,1] with a warning).
AsymmetricOutcome inject_asymmetric(std::span<const Scene> scenes, double tau, double tau_pair,
                                    const std::vector<std::pair<ClassId, ClassId>>& pairs, Rng& rng);

struct NoiseStats {
  double instance_rate = 0.0;
  double point_rate = 0.0;
  Eigen::MatrixXi confusion;  // rows: ground truth, cols: stored label
  std::size_t instances = 0;
  std::size_t noisy_instances = 0;
  std::size_t points = 0;
  std::size_t noisy_points = 0;

  NoiseStats& operator+=(const NoiseStats& other);
};

NoiseStats measure_noise(const Scene& scene, const LabelStore& labels);

}  // namespace pnal

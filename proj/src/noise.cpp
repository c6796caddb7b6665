#include "pnal/noise.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace pnal {
namespace {

ClassId other_class(ClassId gt, int num_classes, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, num_classes - 2);
  const int r = pick(rng);
  return r < gt ? r : r + 1;
}

std::vector<ClassId> partner_table(const std::vector<std::pair<ClassId, ClassId>>& pairs, int num_classes) {
  std::vector<ClassId> partner(static_cast<std::size_t>(num_classes), -1);
  for (auto [a, b] : pairs) {
    partner[static_cast<std::size_t>(a)] = b;
    partner[static_cast<std::size_t>(b)] = a;
  }
  return partner;
}

}  // namespace

void validate(const NoiseConfig& config, int num_classes) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(config.tau)) throw Error("tau must lie in [0,1]");
  if (!unit(config.tau_pair)) throw Error("tau_pair must lie in [0,1]");
  std::set<ClassId> used;
  for (auto [a, b] : config.pairs) {
    if (a < 0 || b < 0 || a >= num_classes || b >= num_classes) throw Error("pair class out of range");
    if (a == b) throw Error("a class cannot pair with itself");
    if (!used.insert(a).second || !used.insert(b).second) throw Error("noise pairs must be disjoint");
  }
}

std::vector<LabelStore> inject_symmetric(std::span<const Scene> scenes, double tau, Rng& rng) {
  if (tau < 0.0 || tau > 1.0) throw Error("tau must lie in [0,1]");
  std::vector<LabelStore> out;
  out.reserve(scenes.size());
  std::bernoulli_distribution flip(tau);
  for (const Scene& scene : scenes) {
    if (scene.num_classes() < 2) throw Error("symmetric noise needs at least 2 classes");
    std::vector<ClassId> labels = scene.gt_labels();
    for (const auto& members : scene.instances()) {
      if (!flip(rng)) continue;
      const ClassId y = other_class(scene.gt_label(members.front()), scene.num_classes(), rng);
      for (PointIndex i : members) labels[static_cast<std::size_t>(i)] = y;
    }
    out.emplace_back(std::move(labels), scene.num_classes());
  }
  return out;
}

LabelStore inject_symmetric(const Scene& scene, double tau, Rng& rng) {
  return std::move(inject_symmetric(std::span<const Scene>(&scene, 1), tau, rng).front());
}

AsymmetricOutcome inject_asymmetric(std::span<const Scene> scenes, double tau, double tau_pair,
                                    const std::vector<std::pair<ClassId, ClassId>>& pairs, Rng& rng) {
  AsymmetricOutcome outcome;
  if (scenes.empty()) return outcome;
  const int num_classes = scenes.front().num_classes();
  NoiseConfig check{NoiseKind::Asymmetric, tau, tau_pair, pairs, 0};
  validate(check, num_classes);
  const auto partner = partner_table(pairs, num_classes);

  std::size_t paired = 0, unpaired = 0;
  for (const Scene& scene : scenes) {
    for (const auto& members : scene.instances()) {
      (partner[static_cast<std::size_t>(scene.gt_label(members.front()))] >= 0 ? paired : unpaired)++;
    }
  }
  const double total = static_cast<double>(paired + unpaired);
  double rate = 0.0;
  if (unpaired > 0) {
    rate = (tau * total - tau_pair * static_cast<double>(paired)) / static_cast<double>(unpaired);
  } else if (std::abs(tau_pair - tau) > 1e-12) {
    outcome.warnings.push_back("every instance is paired; overall rate is tau_pair, not tau");
  }
  if (rate < 0.0 || rate > 1.0) {
    std::ostringstream msg;
    msg << "tau=" << tau << " is infeasible with tau_pair=" << tau_pair << " (unpaired rate " << rate
        << " clamped)";
    outcome.warnings.push_back(msg.str());
    outcome.clamped = true;
    rate = std::clamp(rate, 0.0, 1.0);
  }
  outcome.unpaired_rate = rate;

  std::bernoulli_distribution pair_flip(tau_pair), other_flip(rate);
  for (const Scene& scene : scenes) {
    std::vector<ClassId> labels = scene.gt_labels();
    for (const auto& members : scene.instances()) {
      const ClassId gt = scene.gt_label(members.front());
      const ClassId mate = partner[static_cast<std::size_t>(gt)];
      ClassId y = gt;
      if (mate >= 0) {
        if (pair_flip(rng)) y = mate;
      } else if (other_flip(rng)) {
        y = other_class(gt, num_classes, rng);
      }
      if (y != gt) {
        for (PointIndex i : members) labels[static_cast<std::size_t>(i)] = y;
      }
    }
    outcome.labels.emplace_back(std::move(labels), num_classes);
  }
  return outcome;
}

NoiseStats& NoiseStats::operator+=(const NoiseStats& other) {
  if (confusion.size() == 0) confusion = Eigen::MatrixXi::Zero(other.confusion.rows(), other.confusion.cols());
  confusion += other.confusion;
  instances += other.instances;
  noisy_instances += other.noisy_instances;
  points += other.points;
  noisy_points += other.noisy_points;
  instance_rate = instances ? static_cast<double>(noisy_instances) / static_cast<double>(instances) : 0.0;
  point_rate = points ? static_cast<double>(noisy_points) / static_cast<double>(points) : 0.0;
  return *this;
}

NoiseStats measure_noise(const Scene& scene, const LabelStore& labels) {
  if (labels.size() != scene.size()) throw Error("label store does not match scene");
  NoiseStats stats;
  const int m = scene.num_classes();
  stats.confusion = Eigen::MatrixXi::Zero(m, m);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const auto id = static_cast<PointIndex>(i);
    const ClassId gt = scene.gt_label(id), y = labels.label(id);
    stats.confusion(gt, y) += 1;
    if (gt != y) ++stats.noisy_points;
  }
  const auto groups = scene.instances();
  for (const auto& members : groups) {
    const bool noisy = std::any_of(members.begin(), members.end(),
                                   [&](PointIndex i) { return labels.label(i) != scene.gt_label(i); });
    if (noisy) ++stats.noisy_instances;
  }
  stats.instances = groups.size();
  stats.points = scene.size();
  stats.instance_rate = static_cast<double>(stats.noisy_instances) / static_cast<double>(stats.instances);
  stats.point_rate = static_cast<double>(stats.noisy_points) / static_cast<double>(stats.points);
  return stats;
}

}  // namespace pnal

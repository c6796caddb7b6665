#include "pnal/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pnal {
namespace {

double confidence_from_counts(std::span<const int> counts, int total, int num_classes) {
  if (num_classes < 2) throw Error("confidence needs at least 2 classes");
  double entropy = 0.0;
  for (int c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  return std::clamp(1.0 - entropy / std::log(static_cast<double>(num_classes)), 0.0, 1.0);
}

ClassId mode(std::span<const int> counts) {
  return static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

Eigen::VectorXd label_distribution(const HistoryBuffer& history, PointIndex id, int num_classes) {
  if (!history.full(id)) throw Error("history not full");
  std::vector<int> counts(static_cast<std::size_t>(num_classes));
  history.count(id, counts);
  Eigen::VectorXd p(num_classes);
  for (int m = 0; m < num_classes; ++m) {
    p(m) = static_cast<double>(counts[static_cast<std::size_t>(m)]) / history.capacity();
  }
  return p;
}

double confidence(const Eigen::Ref<const Eigen::VectorXd>& distribution) {
  const auto m = distribution.size();
  if (m < 2) throw Error("confidence needs at least 2 classes");
  double entropy = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double p = distribution(k);
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::clamp(1.0 - entropy / std::log(static_cast<double>(m)), 0.0, 1.0);
}

double confidence(const HistoryBuffer& history, PointIndex id, int num_classes) {
  if (!history.full(id)) throw Error("history not full");
  std::vector<int> counts(static_cast<std::size_t>(num_classes));
  history.count(id, counts);
  return confidence_from_counts(counts, history.capacity(), num_classes);
}

void ReliableSet::add(PointIndex id, ClassId label) {
  if (!ids_.empty() && id <= ids_.back()) sorted_ = false;
  ids_.push_back(id);
  labels_.push_back(label);
}

void ReliableSet::sort_if_needed() const {
  if (sorted_) return;
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  std::vector<PointIndex> ids;
  std::vector<ClassId> labels;
  for (std::size_t k : order) {
    if (!ids.empty() && ids.back() == ids_[k]) continue;
    ids.push_back(ids_[k]);
    labels.push_back(labels_[k]);
  }
  ids_ = std::move(ids);
  labels_ = std::move(labels);
  sorted_ = true;
}

std::optional<ClassId> ReliableSet::find(PointIndex id) const {
  sort_if_needed();
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return labels_[static_cast<std::size_t>(it - ids_.begin())];
}

ReliableSet select_reliable(const HistoryBuffer& history, std::span<const PointIndex> ids, double sigma,
                            int num_classes) {
  ReliableSet out;
  std::vector<int> counts(static_cast<std::size_t>(num_classes));
  for (PointIndex id : ids) {
    if (!history.full(id)) continue;
    history.count(id, counts);
    if (confidence_from_counts(counts, history.capacity(), num_classes) >= sigma) out.add(id, mode(counts));
  }
  return out;
}

}  // namespace pnal

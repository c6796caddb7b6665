#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pnal/history.hpp"

namespace pnal {

/// P(m) = share of the history entries equal to m. Requires a full history
/// (throws Error "history not full").
Eigen::VectorXd label_distribution(const HistoryBuffer& history, PointIndex id, int num_classes);

/// 1 - H(P) / log M with natural logs and 0 log 0 = 0: 1 for a unanimous
/// history, 0 for a uniform one.
double confidence(const Eigen::Ref<const Eigen::VectorXd>& distribution);
double confidence(const HistoryBuffer& history, PointIndex id, int num_classes);

/// Points whose history is full and whose confidence reaches sigma, each
/// with its reliable label (history mode, ties to the lowest class).
class ReliableSet {
 public:
  void add(PointIndex id, ClassId label);
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(PointIndex id) const { return find(id).has_value(); }
  std::optional<ClassId> find(PointIndex id) const;
  const std::vector<PointIndex>& ids() const { return ids_; }
  const std::vector<ClassId>& labels() const { return labels_; }

 private:
  void sort_if_needed() const;

  mutable std::vector<PointIndex> ids_;
  mutable std::vector<ClassId> labels_;
  mutable bool sorted_ = true;
};

/// Ids with a partial history are skipped.
ReliableSet select_reliable(const HistoryBuffer& history, std::span<const PointIndex> ids, double sigma,
                            int num_classes);

}  // namespace pnal

#pragma once

#include <span>
#include <vector>

#include "pnal/types.hpp"

namespace pnal {

/// Last q predicted labels of every point of one scene. Recording into a
/// full buffer evicts the oldest entry.
class HistoryBuffer {
 public:
  HistoryBuffer() = default;
  HistoryBuffer(std::size_t num_points, int capacity);

  int capacity() const { return capacity_; }
  std::size_t size() const { return fill_.size(); }
  int fill(PointIndex i) const { return fill_[static_cast<std::size_t>(i)]; }
  bool full(PointIndex i) const { return fill(i) == capacity_; }

  void record(PointIndex i, ClassId label);

  /// Entries of point i, oldest first.
  std::vector<ClassId> entries(PointIndex i) const;

  /// Number of entries equal to each class, written to counts (size M).
  void count(PointIndex i, std::span<int> counts) const;

 private:
  int capacity_ = 0;
  std::vector<ClassId> ring_;   // num_points x capacity
  std::vector<int> head_;       // next write slot
  std::vector<int> fill_;
};

/// Appends one label per id; points not listed are left untouched.
void record_predictions(HistoryBuffer& history, std::span<const PointIndex> ids,
                        std::span<const ClassId> predicted);

}  // namespace pnal

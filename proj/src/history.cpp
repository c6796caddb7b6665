#include "pnal/history.hpp"

#include <algorithm>

namespace pnal {

HistoryBuffer::HistoryBuffer(std::size_t num_points, int capacity)
    : capacity_(capacity),
      ring_(num_points * static_cast<std::size_t>(capacity), 0),
      head_(num_points, 0),
      fill_(num_points, 0) {
  if (capacity < 1) throw Error("history length must be at least 1");
}

void HistoryBuffer::record(PointIndex i, ClassId label) {
  const auto p = static_cast<std::size_t>(i);
  ring_[p * static_cast<std::size_t>(capacity_) + static_cast<std::size_t>(head_[p])] = label;
  head_[p] = (head_[p] + 1) % capacity_;
  if (fill_[p] < capacity_) ++fill_[p];
}

std::vector<ClassId> HistoryBuffer::entries(PointIndex i) const {
  const auto p = static_cast<std::size_t>(i);
  const int n = fill_[p];
  std::vector<ClassId> out;
  out.reserve(static_cast<std::size_t>(n));
  const int start = (head_[p] - n + capacity_) % capacity_;
  for (int k = 0; k < n; ++k) {
    out.push_back(ring_[p * static_cast<std::size_t>(capacity_) + static_cast<std::size_t>((start + k) % capacity_)]);
  }
  return out;
}

void HistoryBuffer::count(PointIndex i, std::span<int> counts) const {
  std::fill(counts.begin(), counts.end(), 0);
  const auto p = static_cast<std::size_t>(i);
  const ClassId* row = ring_.data() + p * static_cast<std::size_t>(capacity_);
  // Once full every slot is live; before that the live slots are [0, fill).
  for (int k = 0; k < fill_[p]; ++k) {
    const ClassId y = row[k];
    if (y < 0 || static_cast<std::size_t>(y) >= counts.size()) throw Error("history label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
}

void record_predictions(HistoryBuffer& history, std::span<const PointIndex> ids,
                        std::span<const ClassId> predicted) {
  if (ids.size() != predicted.size()) throw Error("one prediction per id required");
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || static_cast<std::size_t>(ids[k]) >= history.size()) throw Error("point index out of range");
    history.record(ids[k], predicted[k]);
  }
}

}  // namespace pnal

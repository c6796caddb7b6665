#include "pnal/voting.hpp"

#include <algorithm>
#include <numeric>

namespace pnal {

int VoteTally::total() const { return std::accumulate(occs.begin(), occs.end(), 0); }

std::vector<int> eligible_clusters(const std::vector<std::vector<PointIndex>>& clusters,
                                   const ReliableSet& reliable) {
  std::vector<int> out;
  if (reliable.empty()) return out;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& members = clusters[c];
    if (std::any_of(members.begin(), members.end(), [&](PointIndex i) { return reliable.contains(i); })) {
      out.push_back(static_cast<int>(c));
    }
  }
  return out;
}

VoteTally tally_votes(std::span<const PointIndex> members, const ReliableSet& reliable, int num_classes) {
  VoteTally t;
  t.occs.assign(static_cast<std::size_t>(num_classes), 0);
  for (PointIndex i : members) {
    if (auto label = reliable.find(i)) ++t.occs[static_cast<std::size_t>(*label)];
  }
  t.top = *std::max_element(t.occs.begin(), t.occs.end());
  return t;
}

std::vector<ClassId> winner_candidates(const VoteTally& tally, double gamma) {
  if (!(gamma >= 1.0)) throw Error("gamma must be at least 1");
  std::vector<ClassId> out;
  if (tally.top <= 0) return out;
  for (std::size_t m = 0; m < tally.occs.size(); ++m) {
    if (static_cast<double>(tally.occs[m]) * gamma >= static_cast<double>(tally.top)) {
      out.push_back(static_cast<ClassId>(m));
    }
  }
  return out;
}

ClassId pick_winner(const VoteTally& tally, double gamma, Rng& rng) {
  const auto candidates = winner_candidates(tally, gamma);
  if (candidates.empty()) throw Error("no reliable votes");
  if (candidates.size() == 1) return candidates.front();
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

void correct_cluster(LabelStore& labels, std::span<const PointIndex> members, ClassId winner) {
  for (PointIndex i : members) labels.replace(i, winner);
}

}  // namespace pnal

#pragma once

#include <span>
#include <vector>

#include "pnal/label_store.hpp"
#include "pnal/random.hpp"
#include "pnal/selection.hpp"

namespace pnal {

/// Per-class count of reliable labels inside one cluster.
struct VoteTally {
  std::vector<int> occs;
  int top = 0;

  int total() const;
};

/// Indices of the clusters holding at least one reliable point.
std::vector<int> eligible_clusters(const std::vector<std::vector<PointIndex>>& clusters,
                                   const ReliableSet& reliable);

/// Non-reliable members contribute nothing.
VoteTally tally_votes(std::span<const PointIndex> members, const ReliableSet& reliable, int num_classes);

/// Classes with occs[m] >= top / gamma, ascending. gamma = 1 leaves the
/// argmax set.
std::vector<ClassId> winner_candidates(const VoteTally& tally, double gamma);

/// Uniform draw over winner_candidates. Throws Error "no reliable votes"
/// when the tally is empty.
ClassId pick_winner(const VoteTally& tally, double gamma, Rng& rng);

/// Writes winner over every member and marks each as replaced.
void correct_cluster(LabelStore& labels, std::span<const PointIndex> members, ClassId winner);

}  // namespace pnal

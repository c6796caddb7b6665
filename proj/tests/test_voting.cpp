#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pnal/voting.hpp"

using namespace pnal;

namespace {

VoteTally tally_of(std::vector<int> occs) {
  VoteTally t;
  t.top = *std::max_element(occs.begin(), occs.end());
  t.occs = std::move(occs);
  return t;
}

ReliableSet reliable_of(std::initializer_list<std::pair<PointIndex, ClassId>> entries) {
  ReliableSet r;
  for (auto [id, y] : entries) r.add(id, y);
  return r;
}

}  // namespace

TEST(Eligible, Cases) {
  const std::vector<std::vector<PointIndex>> clusters{{0, 1, 2}, {3, 4}, {5}};
  EXPECT_TRUE(eligible_clusters(clusters, ReliableSet{}).empty());
  EXPECT_EQ(eligible_clusters(clusters, reliable_of({{0, 1}, {1, 1}, {2, 1}, {3, 0}, {4, 0}, {5, 2}})),
            (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(eligible_clusters(clusters, reliable_of({{4, 3}})), std::vector<int>{1});
}

TEST(Tally, Counts) {
  const std::vector<PointIndex> members{0, 1, 2, 3, 4};
  const auto one = tally_votes(members, reliable_of({{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}}), 6);
  EXPECT_EQ(one.occs, (std::vector<int>{0, 0, 5, 0, 0, 0}));
  EXPECT_EQ(one.top, 5);

  std::vector<PointIndex> big(12);
  std::iota(big.begin(), big.end(), 0);
  ReliableSet r;
  for (PointIndex i = 0; i < 5; ++i) r.add(i, 0);
  for (PointIndex i = 5; i < 8; ++i) r.add(i, 1);
  r.add(8, 2);
  r.add(100, 4);  // not a member
  const auto t = tally_votes(big, r, 6);
  EXPECT_EQ(t.occs, (std::vector<int>{5, 3, 1, 0, 0, 0}));
  EXPECT_EQ(t.top, 5);
  EXPECT_EQ(t.total(), 9);
}

TEST(Winner, CandidateExamples) {
  EXPECT_EQ(winner_candidates(tally_of({5, 3, 1}), 4.0), (std::vector<ClassId>{0, 1}));
  EXPECT_EQ(winner_candidates(tally_of({5, 3, 1}), 1.0), std::vector<ClassId>{0});
  Rng rng(1);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(pick_winner(tally_of({5, 3, 1}), 1.0, rng), 0);
  EXPECT_THROW(winner_candidates(tally_of({5, 3}), 0.5), Error);
  EXPECT_THROW(pick_winner(tally_of({0, 0, 0}), 4.0, rng), Error);
}

TEST(Winner, MatchesEnumeration) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 1000; ++t) {
    const int m = 2 + static_cast<int>(gen() % 6);
    std::vector<int> occs(static_cast<std::size_t>(m));
    for (auto& o : occs) o = static_cast<int>(gen() % 9);
    if (*std::max_element(occs.begin(), occs.end()) == 0) occs[gen() % occs.size()] = 1;
    const double gamma = 1.0 + static_cast<double>(gen() % 700) / 100.0;
    const auto got = winner_candidates(tally_of(occs), gamma);
    EXPECT_EQ(got, oracle::winner_candidates(occs, gamma));
    const int top = *std::max_element(occs.begin(), occs.end());
    EXPECT_TRUE(std::any_of(got.begin(), got.end(), [&](ClassId c) { return occs[static_cast<std::size_t>(c)] == top; }));
  }
}

TEST(Winner, TiesAreUniform) {
  Rng rng(3);
  const int draws = 10000;
  int first = 0;
  for (int t = 0; t < draws; ++t) first += pick_winner(tally_of({4, 4}), 1.0, rng) == 0;
  EXPECT_LE(std::abs(first - draws / 2.0), 3 * std::sqrt(draws * 0.25));
}

TEST(Correct, Semantics) {
  LabelStore s({0, 1, 2, 3, 4}, 6);
  std::vector<PointIndex> c{1, 2};
  correct_cluster(s, std::vector<PointIndex>{1}, 1);
  EXPECT_EQ(s.label(1), 1);
  EXPECT_TRUE(s.ever_replaced(1));
  correct_cluster(s, c, 5);
  correct_cluster(s, c, 3);
  EXPECT_EQ(s.labels(), (std::vector<ClassId>{0, 3, 3, 3, 4}));
  EXPECT_FALSE(s.ever_replaced(0));
  EXPECT_FALSE(s.ever_replaced(3));
}

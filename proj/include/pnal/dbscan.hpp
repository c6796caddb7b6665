#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "pnal/types.hpp"

namespace pnal {

inline constexpr int kNoise = -1;

struct DbscanParams {
  double eps = 0.018;
  int min_pts = 10;
};

/// Partition of n points. cluster_of[i] is a dense id in [0, k) or kNoise;
/// clusters[c] lists the members of c in ascending order.
struct ClusterAssignment {
  std::vector<int> cluster_of;
  std::vector<std::vector<PointIndex>> clusters;

  int k() const { return static_cast<int>(clusters.size()); }
  std::size_t noise_count() const;
};

namespace detail {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& c) const {
    std::uint64_t h = static_cast<std::uint64_t>(c.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(c.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(c.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Eps-neighbourhoods (inclusive, self included) through a uniform grid with
/// cell edge eps.
template <typename Derived>
std::vector<std::vector<PointIndex>> eps_neighbors(const Eigen::MatrixBase<Derived>& points, double eps) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<std::size_t>(points.rows());
  auto cell_of = [&](Eigen::Index i) {
    return detail::CellKey{static_cast<std::int64_t>(std::floor(points(i, 0) / eps)),
                           static_cast<std::int64_t>(std::floor(points(i, 1) / eps)),
                           static_cast<std::int64_t>(std::floor(points(i, 2) / eps))};
  };
  std::unordered_map<detail::CellKey, std::vector<PointIndex>, detail::CellHash> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid[cell_of(static_cast<Eigen::Index>(i))].push_back(static_cast<PointIndex>(i));

  const Scalar eps2 = static_cast<Scalar>(eps * eps);
  std::vector<std::vector<PointIndex>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const detail::CellKey c = cell_of(row);
    auto& nbrs = out[i];
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == grid.end()) continue;
          for (PointIndex j : it->second) {
            if ((points.row(row) - points.row(j)).squaredNorm() <= eps2) nbrs.push_back(j);
          }
        }
      }
    }
    std::sort(nbrs.begin(), nbrs.end());
  }
  return out;
}

/// DBSCAN over the rows of an n x 3 matrix. A point is core when at least
/// min_pts points (itself included) lie within eps. Seeds are expanded in
/// ascending index order, so a border point reachable from several clusters
/// joins the lowest id.
template <typename Derived>
ClusterAssignment dbscan(const Eigen::MatrixBase<Derived>& points, const DbscanParams& params) {
  if (!(params.eps > 0.0)) throw Error("dbscan eps must be positive");
  if (params.min_pts < 1) throw Error("dbscan min_pts must be at least 1");
  if (points.cols() != 3) throw Error("dbscan expects n x 3 positions");
  const auto n = static_cast<std::size_t>(points.rows());
  const auto nbrs = eps_neighbors(points, params.eps);

  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= static_cast<std::size_t>(params.min_pts);

  ClusterAssignment out;
  out.cluster_of.assign(n, kNoise);
  std::deque<PointIndex> frontier;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || out.cluster_of[seed] != kNoise) continue;
    const int id = out.k();
    out.clusters.emplace_back();
    out.cluster_of[seed] = id;
    frontier.push_back(static_cast<PointIndex>(seed));
    while (!frontier.empty()) {
      const PointIndex p = frontier.front();
      frontier.pop_front();
      for (PointIndex q : nbrs[static_cast<std::size_t>(p)]) {
        if (out.cluster_of[static_cast<std::size_t>(q)] != kNoise) continue;
        out.cluster_of[static_cast<std::size_t>(q)] = id;
        if (core[static_cast<std::size_t>(q)]) frontier.push_back(q);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.cluster_of[i] != kNoise) out.clusters[static_cast<std::size_t>(out.cluster_of[i])].push_back(static_cast<PointIndex>(i));
  }
  return out;
}

}  // namespace pnal

#pragma once

#include <array>
#include <span>
#include <vector>

#include "dirh2/geometry.hpp"

namespace dirh2 {

struct ClusterNode {
  int begin = 0, end = 0;  // contiguous range into the permuted point array
  int parent = -1;
  int level = 0;
  std::array<int, 2> child{-1, -1};
  int nchildren = 0;
  Box3 box;

  int size() const { return end - begin; }
  bool is_leaf() const { return nchildren == 0; }
};

// Binary geometrically balanced cluster tree. The point array is permuted so
// that every cluster owns a contiguous index range; `perm[i]` is the original
// index of the point at tree position i.
struct ClusterTree {
  std::vector<ClusterNode> nodes;
  int root = 0;
  std::vector<int> perm;
  std::vector<Point3> points;  // permuted copy, points[i] belongs to tree position i
  std::vector<std::vector<int>> levels;

  int depth() const { return static_cast<int>(levels.size()); }
  int n_points() const { return static_cast<int>(points.size()); }
  int max_children() const;

  // Index set of a cluster as sorted original point indices.
  std::vector<int> index_set(int c) const;
};

// Splits along the longest box axis at the box midpoint while more than
// leaf_size indices remain; falls back to an index-median split whenever the
// geometric split would leave one side empty.
ClusterTree build_cluster_tree(std::span<const Point3> points, int leaf_size);

}  // namespace dirh2

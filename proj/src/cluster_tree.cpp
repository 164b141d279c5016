#include "dirh2/cluster_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dirh2 {

int ClusterTree::max_children() const {
  int m = 0;
  for (const ClusterNode& c : nodes) m = std::max(m, c.nchildren);
  return m;
}

std::vector<int> ClusterTree::index_set(int c) const {
  const ClusterNode& node = nodes[c];
  std::vector<int> ids(perm.begin() + node.begin, perm.begin() + node.end);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

// Recursive bisection; points and perm are swapped in lockstep so every
// cluster ends up with a contiguous range.
struct TreeBuilder {
  ClusterTree& t;
  int leaf_size;

  int run(int begin, int end, int parent, int level) {
    ClusterNode node;
    node.begin = begin;
    node.end = end;
    node.parent = parent;
    node.level = level;
    node.box = bounding_box(std::span<const Point3>(t.points.data() + begin, t.points.data() + end));
    int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back(node);
    if (end - begin <= leaf_size) return id;

    int axis = t.nodes[id].box.longest_axis();
    double mid = 0.5 * (t.nodes[id].box.lower[axis] + t.nodes[id].box.upper[axis]);
    int m = split_geometric(begin, end, axis, mid);
    if (m == begin || m == end) {
      // Degenerate geometry (duplicate or collinear points): median split keeps
      // both sides nonempty and guarantees termination.
      m = split_median(begin, end, axis);
    }
    int left = run(begin, m, id, level + 1);
    int right = run(m, end, id, level + 1);
    t.nodes[id].child = {left, right};
    t.nodes[id].nchildren = 2;
    return id;
  }

  int split_geometric(int begin, int end, int axis, double mid) {
    int i = begin, j = end;
    while (i < j) {
      if (t.points[i][axis] < mid) {
        ++i;
      } else {
        --j;
        std::swap(t.points[i], t.points[j]);
        std::swap(t.perm[i], t.perm[j]);
      }
    }
    return i;
  }

  int split_median(int begin, int end, int axis) {
    std::vector<int> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return t.points[a][axis] < t.points[b][axis]; });
    std::vector<Point3> ptmp(end - begin);
    std::vector<int> itmp(end - begin);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      ptmp[r] = t.points[idx[r]];
      itmp[r] = t.perm[idx[r]];
    }
    std::copy(ptmp.begin(), ptmp.end(), t.points.begin() + begin);
    std::copy(itmp.begin(), itmp.end(), t.perm.begin() + begin);
    return begin + (end - begin) / 2;
  }
};

}  // namespace

ClusterTree build_cluster_tree(std::span<const Point3> points, int leaf_size) {
  if (points.empty()) throw std::invalid_argument("build_cluster_tree: empty point set");
  if (leaf_size < 1) throw std::invalid_argument("build_cluster_tree: leaf_size must be >= 1");

  ClusterTree tree;
  int n = static_cast<int>(points.size());
  tree.perm.resize(n);
  std::iota(tree.perm.begin(), tree.perm.end(), 0);
  tree.points.assign(points.begin(), points.end());

  TreeBuilder builder{tree, leaf_size};
  tree.root = builder.run(0, n, -1, 0);

  int depth = 0;
  for (const ClusterNode& c : tree.nodes) depth = std::max(depth, c.level + 1);
  tree.levels.assign(depth, {});
  for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) tree.levels[tree.nodes[i].level].push_back(i);
  return tree;
}

}  // namespace dirh2

#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dirh2/block_tree.hpp"
#include "dirh2/chebyshev.hpp"
#include "dirh2/cluster_tree.hpp"
#include "dirh2/directions.hpp"
#include "dirh2/kernel.hpp"
#include "dirh2/types.hpp"

namespace dirh2 {

// Nested directional cluster basis. Only (cluster, direction) pairs that are
// reachable from an admissible block -- as row or column cluster, directly or
// through the dirchil map of an ancestor -- carry data. Leaf clusters store
// V_tc explicitly; non-leaf pairs store one transfer matrix per child. The
// basis a non-leaf pair represents is the stacked product of its children's
// bases with the transfer matrices (see expand()).
struct DirectionalClusterBasis {
  const ClusterTree* tree = nullptr;
  const DirectionFamily* dirs = nullptr;

  std::vector<std::pair<int, int>> pairs;             // id -> (cluster, dir)
  std::unordered_map<std::uint64_t, int> pair_ids;    // (cluster, dir) -> id
  std::vector<std::vector<int>> pairs_by_level;
  std::vector<std::vector<int>> pairs_of_cluster;     // cluster -> pair ids

  std::vector<Matrix> leaf;                   // leaf pairs: |t| x rank
  std::vector<std::vector<Matrix>> transfer;  // non-leaf pairs: per child, child_rank x rank
  std::vector<int> rank;                      // columns of each pair's basis

  // Reverse transfer edges: for pair q, the (parent pair, child slot) entries
  // whose transfer matrix maps the parent's coefficients into q.
  std::vector<std::vector<std::pair<int, int>>> parents;

  int n_pairs() const { return static_cast<int>(pairs.size()); }
  int pair_id(int cluster, int dir) const;
  bool is_leaf_pair(int p) const { return tree->nodes[pairs[p].first].is_leaf(); }
  int cluster_of(int p) const { return pairs[p].first; }
  int dir_of(int p) const { return pairs[p].second; }

  // Pair id of child slot i under pair p (follows dirchil).
  int child_pair(int p, int slot) const;

  // Explicit |t| x rank basis matrix, expanding transfer chains recursively.
  Matrix expand(int p) const;

  std::size_t leaf_bytes() const;
  std::size_t transfer_bytes() const;
};

// Registry of used pairs with ranks/matrices unset; shared by the
// interpolation basis and the adaptive bases built during recompression.
DirectionalClusterBasis basis_skeleton(const ClusterTree& tree, const DirectionFamily& dirs,
                                       const DirectedBlockTree& blocks);

// Single-pair assembly primitives.
Matrix leaf_matrix(const ClusterTree& tree, int cluster, const Point3& dir, const InterpRule& rule,
                   double kappa);
Matrix transfer_matrix(const InterpRule& child_rule, const Point3& child_dir,
                       const InterpRule& parent_rule, const Point3& parent_dir, double kappa);
Matrix coupling_matrix(const InterpRule& row_rule, const InterpRule& col_rule, const Point3& dir,
                       const HelmholtzKernel& kernel);

// Directional interpolation basis of uniform rank order^3.
DirectionalClusterBasis build_interpolation_basis(const ClusterTree& tree, const DirectionFamily& dirs,
                                                  const DirectedBlockTree& blocks, int order,
                                                  double kappa, Exec exec = Exec::parallel);

}  // namespace dirh2

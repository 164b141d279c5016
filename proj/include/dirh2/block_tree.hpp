#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dirh2/cluster_tree.hpp"
#include "dirh2/directions.hpp"
#include "dirh2/types.hpp"

namespace dirh2 {

struct AdmissibilityParams {
  double kappa = 0.0;
  double eta1 = 1.0;  // max diam <= eta1 * dist
  double eta2 = 1.0;  // kappa * |unit(center gap) - c| * max diam <= eta2
  double eta3 = 1.0;  // kappa * max diam^2 <= eta3 * dist
};

struct AdmissibilityResult {
  bool admissible = false;
  int dir = -1;  // index into the level's direction set, valid when admissible
};

// Checks the three directional admissibility inequalities with the best
// direction c = argmin |unit(center(tau)-center(sigma)) - c| over dirs.
// Coincident box centers with a nontrivial direction set are inadmissible.
AdmissibilityResult is_admissible(const Box3& tau, const Box3& sigma, const AdmissibilityParams& par,
                                  std::span<const Point3> dirs, bool trivial_dirs);

struct AdmissibleBlock {
  int row = -1, col = -1;
  int dir = -1;
};

struct DenseBlock {
  int row = -1, col = -1;
};

// Directed block tree: the leaf partition of I x I with per-admissible-block
// directions, plus the row sets R_tc and column sets C_sc as lists of block
// indices keyed by pair_key(cluster, dir).
struct DirectedBlockTree {
  std::vector<AdmissibleBlock> admissible;
  std::vector<DenseBlock> inadmissible;
  std::unordered_map<std::uint64_t, std::vector<int>> row_blocks;  // (t,c) -> admissible indices
  std::unordered_map<std::uint64_t, std::vector<int>> col_blocks;  // (s,c) -> admissible indices

  std::vector<int> row_set(int t, int c) const;  // clusters s with (t,s) in L+, dirblock = c
  std::vector<int> col_set(int s, int c) const;  // clusters t with (t,s) in L+, dirblock = c
};

DirectedBlockTree build_block_tree(const ClusterTree& tree, const DirectionFamily& dirs,
                                   const AdmissibilityParams& par);

// Extended row sets: R*_tc = R_tc united with the extended sets of every
// parent direction mapping to c. Only nonempty entries are materialized.
// With columns = true the same recursion runs on the column sets.
std::unordered_map<std::uint64_t, std::vector<int>> extended_row_sets(const ClusterTree& tree,
                                                                      const DirectionFamily& dirs,
                                                                      const DirectedBlockTree& blocks,
                                                                      bool columns = false);

// Per-level CSV: level,clusters,directions,admissible,inadmissible
std::string block_tree_stats_csv(const ClusterTree& tree, const DirectionFamily& dirs,
                                 const DirectedBlockTree& blocks);

}  // namespace dirh2

#include "dirh2/block_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dirh2 {

AdmissibilityResult is_admissible(const Box3& tau, const Box3& sigma, const AdmissibilityParams& par,
                                  std::span<const Point3> dirs, bool trivial_dirs) {
  const double dt = diam(tau);
  const double ds = diam(sigma);
  const double dmax = std::max(dt, ds);
  const double gap = dist(tau, sigma);

  if (dmax > par.eta1 * gap) return {};
  if (par.kappa * dmax * dmax > par.eta3 * gap) return {};

  if (trivial_dirs) {
    // c = 0: the unit center-gap vector keeps norm 1 in the resolution term.
    if (par.kappa * dmax > par.eta2) return {};
    return {true, 0};
  }

  Point3 z0 = tau.center() - sigma.center();
  double nz = norm(z0);
  if (nz == 0.0) return {};  // no direction defined
  Point3 zu{z0.x / nz, z0.y / nz, z0.z / nz};
  int best = 0;
  double bd = dot(zu - dirs[0], zu - dirs[0]);
  for (std::size_t c = 1; c < dirs.size(); ++c) {
    Point3 d = zu - dirs[c];
    double dd = dot(d, d);
    if (dd < bd) {
      bd = dd;
      best = static_cast<int>(c);
    }
  }
  if (par.kappa * std::sqrt(bd) * dmax > par.eta2) return {};
  return {true, best};
}

namespace {

struct BlockBuilder {
  const ClusterTree& tree;
  const DirectionFamily& dirs;
  const AdmissibilityParams& par;
  DirectedBlockTree out;

  void run(int t, int s) {
    const ClusterNode& tn = tree.nodes[t];
    const ClusterNode& sn = tree.nodes[s];
    int level = tn.level;
    auto adm = is_admissible(tn.box, sn.box, par, dirs.level_dirs[level], dirs.trivial[level]);
    if (adm.admissible) {
      int id = static_cast<int>(out.admissible.size());
      out.admissible.push_back({t, s, adm.dir});
      out.row_blocks[pair_key(t, adm.dir)].push_back(id);
      out.col_blocks[pair_key(s, adm.dir)].push_back(id);
      return;
    }
    if (tn.is_leaf() || sn.is_leaf()) {
      out.inadmissible.push_back({t, s});
      return;
    }
    for (int i = 0; i < tn.nchildren; ++i)
      for (int j = 0; j < sn.nchildren; ++j) run(tn.child[i], sn.child[j]);
  }
};

}  // namespace

DirectedBlockTree build_block_tree(const ClusterTree& tree, const DirectionFamily& dirs,
                                   const AdmissibilityParams& par) {
  BlockBuilder builder{tree, dirs, par, {}};
  builder.run(tree.root, tree.root);
  return std::move(builder.out);
}

std::vector<int> DirectedBlockTree::row_set(int t, int c) const {
  std::vector<int> cols;
  auto it = row_blocks.find(pair_key(t, c));
  if (it == row_blocks.end()) return cols;
  for (int b : it->second) cols.push_back(admissible[b].col);
  return cols;
}

std::vector<int> DirectedBlockTree::col_set(int s, int c) const {
  std::vector<int> rows;
  auto it = col_blocks.find(pair_key(s, c));
  if (it == col_blocks.end()) return rows;
  for (int b : it->second) rows.push_back(admissible[b].row);
  return rows;
}

std::unordered_map<std::uint64_t, std::vector<int>> extended_row_sets(const ClusterTree& tree,
                                                                      const DirectionFamily& dirs,
                                                                      const DirectedBlockTree& blocks,
                                                                      bool columns) {
  const auto& own = columns ? blocks.col_blocks : blocks.row_blocks;
  std::unordered_map<std::uint64_t, std::vector<int>> ext;

  // Top-down: parents are processed before children because node ids grow
  // with depth-first construction order; iterate levels to be explicit.
  for (const auto& level : tree.levels) {
    for (int t : level) {
      const ClusterNode& tn = tree.nodes[t];
      // inherited part
      if (tn.parent >= 0) {
        int plevel = tn.level - 1;
        for (int cp = 0; cp < dirs.count(plevel); ++cp) {
          auto pit = ext.find(pair_key(tn.parent, cp));
          if (pit == ext.end()) continue;
          int c = dirs.dirchil(plevel, cp);
          auto& dst = ext[pair_key(t, c)];
          dst.insert(dst.end(), pit->second.begin(), pit->second.end());
        }
      }
      // own blocks
      for (int c = 0; c < dirs.count(tn.level); ++c) {
        auto it = own.find(pair_key(t, c));
        if (it == own.end()) continue;
        auto& dst = ext[pair_key(t, c)];
        for (int b : it->second)
          dst.push_back(columns ? blocks.admissible[b].row : blocks.admissible[b].col);
      }
    }
  }
  return ext;
}

std::string block_tree_stats_csv(const ClusterTree& tree, const DirectionFamily& dirs,
                                 const DirectedBlockTree& blocks) {
  int depth = tree.depth();
  std::vector<int> adm(depth, 0), inadm(depth, 0);
  for (const auto& b : blocks.admissible) ++adm[tree.nodes[b.row].level];
  for (const auto& b : blocks.inadmissible) ++inadm[tree.nodes[b.row].level];
  std::ostringstream os;
  os << "level,clusters,directions,admissible,inadmissible\n";
  for (int l = 0; l < depth; ++l) {
    os << l << ',' << tree.levels[l].size() << ',' << dirs.count(l) << ',' << adm[l] << ',' << inadm[l] << '\n';
  }
  return os.str();
}

}  // namespace dirh2

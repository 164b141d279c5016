#include "dirh2/cluster_basis.hpp"

#include <algorithm>
#include <unordered_set>

namespace dirh2 {

int DirectionalClusterBasis::pair_id(int cluster, int dir) const {
  auto it = pair_ids.find(pair_key(cluster, dir));
  return it == pair_ids.end() ? -1 : it->second;
}

int DirectionalClusterBasis::child_pair(int p, int slot) const {
  auto [t, c] = pairs[p];
  const ClusterNode& tn = tree->nodes[t];
  int cc = dirs->dirchil(tn.level, c);
  return pair_id(tn.child[slot], cc);
}

Matrix DirectionalClusterBasis::expand(int p) const {
  auto [t, c] = pairs[p];
  const ClusterNode& tn = tree->nodes[t];
  if (tn.is_leaf()) return leaf[p];
  Matrix v(tn.size(), rank[p]);
  int row = 0;
  for (int i = 0; i < tn.nchildren; ++i) {
    int q = child_pair(p, i);
    Matrix vc = expand(q) * transfer[p][i];
    v.middleRows(row, vc.rows()) = vc;
    row += static_cast<int>(vc.rows());
  }
  return v;
}

std::size_t DirectionalClusterBasis::leaf_bytes() const {
  std::size_t b = 0;
  for (const Matrix& m : leaf) b += sizeof(cplx) * static_cast<std::size_t>(m.size());
  return b;
}

std::size_t DirectionalClusterBasis::transfer_bytes() const {
  std::size_t b = 0;
  for (const auto& list : transfer)
    for (const Matrix& m : list) b += sizeof(cplx) * static_cast<std::size_t>(m.size());
  return b;
}

DirectionalClusterBasis basis_skeleton(const ClusterTree& tree, const DirectionFamily& dirs,
                                       const DirectedBlockTree& blocks) {
  DirectionalClusterBasis basis;
  basis.tree = &tree;
  basis.dirs = &dirs;

  // Mark every pair referenced by an admissible block on either side, then
  // close downward: a marked non-leaf pair needs its children's pairs.
  std::vector<std::vector<std::pair<int, int>>> by_level(tree.depth());
  std::unordered_set<std::uint64_t> seen;
  auto mark = [&](int cluster, int dir) {
    if (seen.insert(pair_key(cluster, dir)).second)
      by_level[tree.nodes[cluster].level].push_back({cluster, dir});
  };
  for (const auto& b : blocks.admissible) {
    mark(b.row, b.dir);
    mark(b.col, b.dir);
  }
  for (int l = 0; l < tree.depth(); ++l) {
    for (std::size_t i = 0; i < by_level[l].size(); ++i) {
      auto [t, c] = by_level[l][i];
      const ClusterNode& tn = tree.nodes[t];
      if (tn.is_leaf()) continue;
      int cc = dirs.dirchil(l, c);
      for (int s = 0; s < tn.nchildren; ++s) mark(tn.child[s], cc);
    }
  }

  basis.pairs_by_level.resize(tree.depth());
  basis.pairs_of_cluster.resize(tree.nodes.size());
  for (int l = 0; l < tree.depth(); ++l) {
    auto& lv = by_level[l];
    std::sort(lv.begin(), lv.end());
    for (auto [t, c] : lv) {
      int id = static_cast<int>(basis.pairs.size());
      basis.pairs.push_back({t, c});
      basis.pair_ids[pair_key(t, c)] = id;
      basis.pairs_by_level[l].push_back(id);
      basis.pairs_of_cluster[t].push_back(id);
    }
  }

  int np = basis.n_pairs();
  basis.leaf.resize(np);
  basis.transfer.resize(np);
  basis.rank.assign(np, 0);
  basis.parents.resize(np);
  for (int p = 0; p < np; ++p) {
    if (basis.is_leaf_pair(p)) continue;
    const ClusterNode& tn = tree.nodes[basis.pairs[p].first];
    basis.transfer[p].resize(tn.nchildren);
    for (int i = 0; i < tn.nchildren; ++i) basis.parents[basis.child_pair(p, i)].push_back({p, i});
  }
  return basis;
}

Matrix leaf_matrix(const ClusterTree& tree, int cluster, const Point3& dir, const InterpRule& rule,
                   double kappa) {
  const ClusterNode& tn = tree.nodes[cluster];
  Matrix v(tn.size(), rule.k());
  for (int r = 0; r < tn.size(); ++r) {
    const Point3& x = tree.points[tn.begin + r];
    cplx phase = std::polar(1.0, kappa * dot(dir, x));
    RealVector l = rule.lagrange(x);
    for (int nu = 0; nu < rule.k(); ++nu) v(r, nu) = phase * l(nu);
  }
  return v;
}

Matrix transfer_matrix(const InterpRule& child_rule, const Point3& child_dir,
                       const InterpRule& parent_rule, const Point3& parent_dir, double kappa) {
  int k = parent_rule.k();
  Matrix e(child_rule.k(), k);
  Point3 dc = parent_dir - child_dir;
  for (int nup = 0; nup < child_rule.k(); ++nup) {
    Point3 xi = child_rule.point(nup);
    cplx phase = std::polar(1.0, kappa * dot(dc, xi));
    RealVector l = parent_rule.lagrange(xi);
    for (int nu = 0; nu < k; ++nu) e(nup, nu) = phase * l(nu);
  }
  return e;
}

Matrix coupling_matrix(const InterpRule& row_rule, const InterpRule& col_rule, const Point3& dir,
                       const HelmholtzKernel& kernel) {
  Matrix s(row_rule.k(), col_rule.k());
  for (int mu = 0; mu < col_rule.k(); ++mu) {
    Point3 xi_s = col_rule.point(mu);
    for (int nu = 0; nu < row_rule.k(); ++nu) s(nu, mu) = kernel.directional(row_rule.point(nu), xi_s, dir);
  }
  return s;
}

DirectionalClusterBasis build_interpolation_basis(const ClusterTree& tree, const DirectionFamily& dirs,
                                                  const DirectedBlockTree& blocks, int order,
                                                  double kappa, Exec exec) {
  DirectionalClusterBasis basis = basis_skeleton(tree, dirs, blocks);
  std::vector<InterpRule> rules(tree.nodes.size());
  for (std::size_t t = 0; t < tree.nodes.size(); ++t) rules[t] = chebyshev_rule(tree.nodes[t].box, order);

  const int np = basis.n_pairs();
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int p = 0; p < np; ++p) {
    auto [t, c] = basis.pairs[p];
    const ClusterNode& tn = tree.nodes[t];
    const Point3& cd = dirs.direction(tn.level, c);
    basis.rank[p] = rules[t].k();
    if (tn.is_leaf()) {
      basis.leaf[p] = leaf_matrix(tree, t, cd, rules[t], kappa);
    } else {
      int cc = dirs.dirchil(tn.level, c);
      const Point3& ccd = dirs.direction(tn.level + 1, cc);
      for (int i = 0; i < tn.nchildren; ++i)
        basis.transfer[p][i] = transfer_matrix(rules[tn.child[i]], ccd, rules[t], cd, kappa);
    }
  }
  return basis;
}

}  // namespace dirh2

#include "dirh2/dh2.hpp"

#include <sstream>
#include <stdexcept>

namespace dirh2 {

DH2Matrix assemble_dh2(const ClusterTree& tree, const DirectionFamily& dirs,
                       const DirectedBlockTree& blocks, int order, const HelmholtzKernel& kernel,
                       Exec exec) {
  DH2Matrix a;
  a.tree = &tree;
  a.dirs = &dirs;
  a.blocks = &blocks;
  auto basis = std::make_shared<DirectionalClusterBasis>(
      build_interpolation_basis(tree, dirs, blocks, order, kernel.kappa, exec));
  a.row_basis = basis;
  a.col_basis = basis;

  std::vector<InterpRule> rules(tree.nodes.size());
  for (std::size_t t = 0; t < tree.nodes.size(); ++t) rules[t] = chebyshev_rule(tree.nodes[t].box, order);

  const bool par = exec == Exec::parallel;
  const int nadm = static_cast<int>(blocks.admissible.size());
  a.coupling.resize(nadm);
#pragma omp parallel for schedule(dynamic) if (par)
  for (int b = 0; b < nadm; ++b) {
    const AdmissibleBlock& blk = blocks.admissible[b];
    const Point3& c = dirs.direction(tree.nodes[blk.row].level, blk.dir);
    a.coupling[b] = coupling_matrix(rules[blk.row], rules[blk.col], c, kernel);
  }

  const int nina = static_cast<int>(blocks.inadmissible.size());
  a.nearfield.resize(nina);
#pragma omp parallel for schedule(dynamic) if (par)
  for (int b = 0; b < nina; ++b) {
    const DenseBlock& blk = blocks.inadmissible[b];
    const ClusterNode& tn = tree.nodes[blk.row];
    const ClusterNode& sn = tree.nodes[blk.col];
    Matrix m(tn.size(), sn.size());
    for (int j = 0; j < sn.size(); ++j) {
      const Point3& y = tree.points[sn.begin + j];
      for (int i = 0; i < tn.size(); ++i) {
        const Point3& x = tree.points[tn.begin + i];
        m(i, j) = norm(x - y) == 0.0 ? cplx(0.0) : kernel(x, y);
      }
    }
    a.nearfield[b] = std::move(m);
  }

  a.nearfield_of_row.resize(tree.nodes.size());
  a.nearfield_of_col.resize(tree.nodes.size());
  for (int b = 0; b < nina; ++b) {
    a.nearfield_of_row[blocks.inadmissible[b].row].push_back(b);
    a.nearfield_of_col[blocks.inadmissible[b].col].push_back(b);
  }
  return a;
}

namespace {

// Forward transform: coefficients xhat_{sc} = V_{sc}^* x for every pair of
// the given basis, children before parents.
std::vector<Vector> forward(const DirectionalClusterBasis& basis, const Vector& xp, bool par) {
  std::vector<Vector> xhat(basis.n_pairs());
  for (int l = static_cast<int>(basis.pairs_by_level.size()) - 1; l >= 0; --l) {
    const auto& lv = basis.pairs_by_level[l];
    const int m = static_cast<int>(lv.size());
#pragma omp parallel for schedule(dynamic) if (par)
    for (int i = 0; i < m; ++i) {
      int p = lv[i];
      const ClusterNode& tn = basis.tree->nodes[basis.cluster_of(p)];
      if (tn.is_leaf()) {
        xhat[p] = basis.leaf[p].adjoint() * xp.segment(tn.begin, tn.size());
      } else {
        Vector v = Vector::Zero(basis.rank[p]);
        for (int s = 0; s < tn.nchildren; ++s) v += basis.transfer[p][s].adjoint() * xhat[basis.child_pair(p, s)];
        xhat[p] = std::move(v);
      }
    }
  }
  return xhat;
}

// Backward transform: accumulate yhat down the tree and scatter leaf
// contributions into yp. Children pull from their parents, so every slot has
// a single writer.
void backward(const DirectionalClusterBasis& basis, std::vector<Vector>& yhat, Vector& yp, bool par) {
  const int depth = static_cast<int>(basis.pairs_by_level.size());
  for (int l = 0; l < depth; ++l) {
    const auto& lv = basis.pairs_by_level[l];
    const int m = static_cast<int>(lv.size());
#pragma omp parallel for schedule(dynamic) if (par)
    for (int i = 0; i < m; ++i) {
      int p = lv[i];
      for (auto [parent, slot] : basis.parents[p]) {
        if (yhat[parent].size() > 0) {
          if (yhat[p].size() == 0) yhat[p] = Vector::Zero(basis.rank[p]);
          yhat[p] += basis.transfer[parent][slot] * yhat[parent];
        }
      }
    }
  }
  // Scatter per leaf cluster: one writer per segment, pairs in fixed order.
  const int nclusters = static_cast<int>(basis.pairs_of_cluster.size());
#pragma omp parallel for schedule(dynamic) if (par)
  for (int t = 0; t < nclusters; ++t) {
    const ClusterNode& tn = basis.tree->nodes[t];
    if (!tn.is_leaf()) continue;
    for (int p : basis.pairs_of_cluster[t])
      if (yhat[p].size() > 0) yp.segment(tn.begin, tn.size()) += basis.leaf[p] * yhat[p];
  }
}

Vector apply(const DH2Matrix& a, const Vector& x, bool adjoint, Exec exec) {
  if (!a.tree) throw std::invalid_argument("matvec: empty matrix");
  const int n = a.dim();
  if (x.size() != n) throw std::invalid_argument("matvec: dimension mismatch");
  const bool par = exec == Exec::parallel;
  const ClusterTree& tree = *a.tree;

  Vector xp(n);
  for (int i = 0; i < n; ++i) xp(i) = x(tree.perm[i]);

  const DirectionalClusterBasis& fwd_basis = adjoint ? *a.row_basis : *a.col_basis;
  const DirectionalClusterBasis& bwd_basis = adjoint ? *a.col_basis : *a.row_basis;
  std::vector<Vector> xhat = forward(fwd_basis, xp, par);

  // Couplings: accumulate per output pair over its fixed block list.
  std::vector<Vector> yhat(bwd_basis.n_pairs());
  const auto& out_blocks = adjoint ? a.blocks->col_blocks : a.blocks->row_blocks;
  const int npairs = bwd_basis.n_pairs();
#pragma omp parallel for schedule(dynamic) if (par)
  for (int p = 0; p < npairs; ++p) {
    auto [t, c] = bwd_basis.pairs[p];
    auto it = out_blocks.find(pair_key(t, c));
    if (it == out_blocks.end()) continue;
    Vector v = Vector::Zero(bwd_basis.rank[p]);
    for (int b : it->second) {
      const AdmissibleBlock& blk = a.blocks->admissible[b];
      int other = adjoint ? blk.row : blk.col;
      int q = fwd_basis.pair_id(other, blk.dir);
      if (adjoint)
        v += a.coupling[b].adjoint() * xhat[q];
      else
        v += a.coupling[b] * xhat[q];
    }
    yhat[p] = std::move(v);
  }

  Vector yp = Vector::Zero(n);
  backward(bwd_basis, yhat, yp, par);

  // Nearfield, grouped by output cluster. Leaf-cluster groups own disjoint
  // segments and run in parallel; blocks whose output cluster is not a leaf
  // (mixed-depth partitions) overlap them and run in a serial pass.
  const auto& groups = adjoint ? a.nearfield_of_col : a.nearfield_of_row;
  const int nclusters = static_cast<int>(groups.size());
  auto apply_block = [&](int b) {
    const DenseBlock& blk = a.blocks->inadmissible[b];
    const ClusterNode& tn = tree.nodes[adjoint ? blk.col : blk.row];
    const ClusterNode& sn = tree.nodes[adjoint ? blk.row : blk.col];
    if (adjoint)
      yp.segment(tn.begin, tn.size()) += a.nearfield[b].adjoint() * xp.segment(sn.begin, sn.size());
    else
      yp.segment(tn.begin, tn.size()) += a.nearfield[b] * xp.segment(sn.begin, sn.size());
  };
#pragma omp parallel for schedule(dynamic) if (par)
  for (int t = 0; t < nclusters; ++t) {
    if (!tree.nodes[t].is_leaf()) continue;
    for (int b : groups[t]) apply_block(b);
  }
  for (int t = 0; t < nclusters; ++t) {
    if (tree.nodes[t].is_leaf()) continue;
    for (int b : groups[t]) apply_block(b);
  }

  Vector y(n);
  for (int i = 0; i < n; ++i) y(tree.perm[i]) = yp(i);
  return y;
}

}  // namespace

Vector matvec(const DH2Matrix& a, const Vector& x, Exec exec) { return apply(a, x, false, exec); }

Vector matvec_adjoint(const DH2Matrix& a, const Vector& x, Exec exec) { return apply(a, x, true, exec); }

Matrix to_dense_tree(const DH2Matrix& a) {
  if (!a.tree) return Matrix(0, 0);
  const int n = a.dim();
  if (n > 16384) throw std::invalid_argument("to_dense: dimension guard exceeded");
  const ClusterTree& tree = *a.tree;

  std::vector<Matrix> row_cache(a.row_basis->n_pairs());
  std::vector<Matrix> col_cache;
  const bool shared = a.row_basis == a.col_basis;
  if (!shared) col_cache.resize(a.col_basis->n_pairs());
  auto expanded = [](const DirectionalClusterBasis& basis, std::vector<Matrix>& cache, int p) -> const Matrix& {
    if (cache[p].size() == 0) cache[p] = basis.expand(p);
    return cache[p];
  };

  Matrix gt = Matrix::Zero(n, n);
  for (std::size_t b = 0; b < a.blocks->admissible.size(); ++b) {
    const AdmissibleBlock& blk = a.blocks->admissible[b];
    const ClusterNode& tn = tree.nodes[blk.row];
    const ClusterNode& sn = tree.nodes[blk.col];
    const Matrix& vr = expanded(*a.row_basis, row_cache, a.row_basis->pair_id(blk.row, blk.dir));
    const Matrix& vc = shared ? expanded(*a.row_basis, row_cache, a.row_basis->pair_id(blk.col, blk.dir))
                              : expanded(*a.col_basis, col_cache, a.col_basis->pair_id(blk.col, blk.dir));
    gt.block(tn.begin, sn.begin, tn.size(), sn.size()) = vr * a.coupling[b] * vc.adjoint();
  }
  for (std::size_t b = 0; b < a.blocks->inadmissible.size(); ++b) {
    const DenseBlock& blk = a.blocks->inadmissible[b];
    const ClusterNode& tn = tree.nodes[blk.row];
    const ClusterNode& sn = tree.nodes[blk.col];
    gt.block(tn.begin, sn.begin, tn.size(), sn.size()) = a.nearfield[b];
  }
  return gt;
}

Matrix to_dense(const DH2Matrix& a) {
  if (!a.tree) return Matrix(0, 0);
  Matrix gt = to_dense_tree(a);
  const int n = a.dim();
  const ClusterTree& tree = *a.tree;
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(tree.perm[i], tree.perm[j]) = gt(i, j);
  return g;
}

Matrix exact_kernel_dense_tree(const ClusterTree& tree, const HelmholtzKernel& kernel) {
  const int n = tree.n_points();
  Matrix h(n, n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      h(i, j) = norm(tree.points[i] - tree.points[j]) == 0.0 ? cplx(0.0) : kernel(tree.points[i], tree.points[j]);
  return h;
}

Matrix exact_kernel_dense(const ClusterTree& tree, const HelmholtzKernel& kernel) {
  Matrix ht = exact_kernel_dense_tree(tree, kernel);
  const int n = tree.n_points();
  Matrix h(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) h(tree.perm[i], tree.perm[j]) = ht(i, j);
  return h;
}

std::string StorageReport::csv() const {
  std::ostringstream os;
  os << "category,bytes\n"
     << "leaf," << leaf << "\n"
     << "transfer," << transfer << "\n"
     << "coupling," << coupling << "\n"
     << "nearfield," << nearfield << "\n"
     << "weights," << weights << "\n";
  return os.str();
}

StorageReport storage_report(const DH2Matrix& a, std::size_t weight_bytes) {
  StorageReport r;
  r.weights = weight_bytes;
  if (a.row_basis) {
    r.leaf += a.row_basis->leaf_bytes();
    r.transfer += a.row_basis->transfer_bytes();
    if (a.col_basis && a.col_basis != a.row_basis) {
      r.leaf += a.col_basis->leaf_bytes();
      r.transfer += a.col_basis->transfer_bytes();
    }
  }
  for (const Matrix& m : a.coupling) r.coupling += sizeof(cplx) * static_cast<std::size_t>(m.size());
  for (const Matrix& m : a.nearfield) r.nearfield += sizeof(cplx) * static_cast<std::size_t>(m.size());
  return r;
}

}  // namespace dirh2

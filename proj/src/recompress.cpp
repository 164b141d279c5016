#include "dirh2/recompress.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dirh2 {

namespace {

DirectionalClusterBasis clone_registry(const DirectionalClusterBasis& src) {
  DirectionalClusterBasis b;
  b.tree = src.tree;
  b.dirs = src.dirs;
  b.pairs = src.pairs;
  b.pair_ids = src.pair_ids;
  b.pairs_by_level = src.pairs_by_level;
  b.pairs_of_cluster = src.pairs_of_cluster;
  b.parents = src.parents;
  b.leaf.resize(src.n_pairs());
  b.transfer.resize(src.n_pairs());
  for (int p = 0; p < src.n_pairs(); ++p) b.transfer[p].resize(src.transfer[p].size());
  b.rank.assign(src.n_pairs(), 0);
  return b;
}

struct BasisBuilder {
  const DH2Matrix& a;
  const std::vector<Matrix>& colw;
  const TruncationControl& ctrl;
  const BlockOmegas* omegas;
  bool symmetric, columns, par;
  const DirectionalClusterBasis& v;  // basis being replaced
  AdaptiveBasis& out;
  std::vector<Matrix> z;

  void visit(int t) {
    const auto& pairs = v.pairs_of_cluster[t];
    const int np = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (par)
    for (int i = 0; i < np; ++i)
      z[pairs[i]] = total_weight_of_pair(a, pairs[i], colw, omegas, symmetric, columns, &z);

    const ClusterNode& tn = a.tree->nodes[t];
    for (int s = 0; s < tn.nchildren; ++s) visit(tn.child[s]);

#pragma omp parallel for schedule(dynamic) if (par)
    for (int i = 0; i < np; ++i) truncate_pair(pairs[i]);

    for (int p : pairs) z[p] = Matrix();
  }

  void truncate_pair(int p) {
    const ClusterNode& tn = a.tree->nodes[v.cluster_of(p)];
    Matrix vhat;  // non-leaf: V projected into the children's new bases
    Matrix m;
    if (tn.is_leaf()) {
      m = v.leaf[p] * z[p].adjoint();
    } else {
      std::vector<Matrix> rows(tn.nchildren);
      for (int s = 0; s < tn.nchildren; ++s) rows[s] = out.T[v.child_pair(p, s)] * v.transfer[p][s];
      vhat = vstack(rows);
      m = vhat * z[p].adjoint();
    }
    auto [u, sigma] = left_svd(m);
    int rank = truncation_rank(sigma, ctrl.eps, ctrl.max_rank);
    out.spectra[p] = sigma;
    out.basis.rank[p] = rank;
    if (tn.is_leaf()) {
      out.basis.leaf[p] = u.leftCols(rank);
      out.T[p] = out.basis.leaf[p].adjoint() * v.leaf[p];
    } else {
      out.qhat[p] = u.leftCols(rank);
      out.T[p] = out.qhat[p].adjoint() * vhat;
      Eigen::Index row = 0;
      for (int s = 0; s < tn.nchildren; ++s) {
        int rk = out.basis.rank[v.child_pair(p, s)];
        out.basis.transfer[p][s] = out.qhat[p].middleRows(row, rk);
        row += rk;
      }
    }
  }
};

}  // namespace

std::string AdaptiveBasis::rank_report_csv() const {
  std::ostringstream os;
  os << "level,cluster_size,k,k_tc,sigma_kept,sigma_dropped\n";
  os.precision(17);
  for (int p = 0; p < basis.n_pairs(); ++p) {
    const ClusterNode& tn = basis.tree->nodes[basis.cluster_of(p)];
    int k = static_cast<int>(T[p].cols());
    int ktc = basis.rank[p];
    double kept = ktc > 0 && ktc <= spectra[p].size() ? spectra[p](ktc - 1) : 0.0;
    double dropped = ktc < spectra[p].size() ? spectra[p](ktc) : 0.0;
    os << tn.level << ',' << tn.size() << ',' << k << ',' << ktc << ',' << kept << ',' << dropped << '\n';
  }
  return os.str();
}

AdaptiveBasis build_adaptive_basis(const DH2Matrix& a, const std::vector<Matrix>& col_weights,
                                   const TruncationControl& ctrl, const BlockOmegas* omegas,
                                   bool symmetric, bool columns, Exec exec) {
  if (!a.tree) throw std::invalid_argument("build_adaptive_basis: empty matrix");
  if (a.row_basis != a.col_basis)
    throw std::invalid_argument("build_adaptive_basis: input must carry the shared interpolation basis");
  if (ctrl.eps <= 0.0) throw std::invalid_argument("build_adaptive_basis: eps must be > 0");
  if (ctrl.mode == TruncationMode::block_relative && omegas == nullptr)
    throw std::invalid_argument("build_adaptive_basis: block-relative mode needs omegas");
  if (ctrl.mode == TruncationMode::absolute) omegas = nullptr;

  const DirectionalClusterBasis& v = *a.row_basis;
  AdaptiveBasis out;
  out.basis = clone_registry(v);
  out.T.resize(v.n_pairs());
  out.qhat.resize(v.n_pairs());
  out.spectra.resize(v.n_pairs());

  BasisBuilder builder{a, col_weights, ctrl, omegas, symmetric, columns, exec == Exec::parallel, v, out, {}};
  builder.z.resize(v.n_pairs());
  builder.visit(a.tree->root);
  return out;
}

DH2Matrix project_couplings(const DH2Matrix& a, const AdaptiveBasis& row, const AdaptiveBasis& col) {
  DH2Matrix out;
  out.tree = a.tree;
  out.dirs = a.dirs;
  out.blocks = a.blocks;
  auto row_ptr = std::make_shared<DirectionalClusterBasis>(row.basis);
  out.row_basis = row_ptr;
  out.col_basis = &row == &col ? row_ptr : std::make_shared<DirectionalClusterBasis>(col.basis);

  out.coupling.resize(a.coupling.size());
  for (std::size_t b = 0; b < a.coupling.size(); ++b) {
    const AdmissibleBlock& blk = a.blocks->admissible[b];
    int pr = out.row_basis->pair_id(blk.row, blk.dir);
    int pc = out.col_basis->pair_id(blk.col, blk.dir);
    if (pr < 0 || pc < 0) throw std::runtime_error("project_couplings: missing basis for referenced block");
    out.coupling[b] = row.T[pr] * a.coupling[b] * col.T[pc].adjoint();
  }
  out.nearfield = a.nearfield;
  out.nearfield_of_row = a.nearfield_of_row;
  out.nearfield_of_col = a.nearfield_of_col;
  return out;
}

namespace {

// Random complex vectors with a fixed seed; deterministic across runs.
Matrix random_vectors(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix x(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) x(i, j) = cplx(gauss(rng), gauss(rng));
  return x;
}

// Deterministic block sample: every stride-th admissible block.
std::vector<int> sample_blocks(std::size_t count, int max_blocks) {
  std::vector<int> ids;
  if (count == 0) return ids;
  std::size_t stride = std::max<std::size_t>(1, count / static_cast<std::size_t>(max_blocks));
  for (std::size_t b = 0; b < count; b += stride) ids.push_back(static_cast<int>(b));
  return ids;
}

}  // namespace

ErrorRepReport verify_error_representation(const DH2Matrix& a, const AdaptiveBasis& row, double tol,
                                           int max_blocks, int nvec, std::uint64_t seed) {
  if (a.dim() > 2048) throw std::invalid_argument("verify_error_representation: dense-oracle guard exceeded");
  const ClusterTree& tree = *a.tree;
  Matrix gt = to_dense_tree(a);

  std::vector<Matrix> qexp(row.basis.n_pairs());
  auto expanded = [&](int p) -> const Matrix& {
    if (qexp[p].size() == 0 && row.basis.rank[p] > 0) qexp[p] = row.basis.expand(p);
    if (qexp[p].size() == 0) qexp[p] = Matrix(tree.nodes[row.basis.cluster_of(p)].size(), 0);
    return qexp[p];
  };

  ErrorRepReport rep;
  rep.vectors_per_block = nvec;
  rep.pass = true;

  for (int b : sample_blocks(a.blocks->admissible.size(), max_blocks)) {
    const AdmissibleBlock& blk = a.blocks->admissible[b];
    const ClusterNode& tn = tree.nodes[blk.row];
    const ClusterNode& sn = tree.nodes[blk.col];
    Matrix gb = gt.block(tn.begin, sn.begin, tn.size(), sn.size());
    Matrix xs = random_vectors(sn.size(), nvec, seed + static_cast<std::uint64_t>(b));

    for (int j = 0; j < nvec; ++j) {
      Vector gx = gb * xs.col(j);
      int p = row.basis.pair_id(blk.row, blk.dir);
      const Matrix& q = expanded(p);
      double lhs = (gx - q * (q.adjoint() * gx)).squaredNorm();

      // Sum of descendant contributions.
      double rhs = 0.0;
      auto descend = [&](auto&& self, int pp) -> void {
        int t = row.basis.cluster_of(pp);
        const ClusterNode& node = tree.nodes[t];
        Vector gbx = gt.block(node.begin, sn.begin, node.size(), sn.size()) * xs.col(j);
        if (node.is_leaf()) {
          const Matrix& ql = row.basis.leaf[pp];
          rhs += (gbx - ql * (ql.adjoint() * gbx)).squaredNorm();
          return;
        }
        Vector u(row.qhat[pp].rows());
        Eigen::Index off = 0;
        for (int s = 0; s < node.nchildren; ++s) {
          int cp = row.basis.child_pair(pp, s);
          const ClusterNode& cn = tree.nodes[node.child[s]];
          const Matrix& qc = expanded(cp);
          u.segment(off, qc.cols()) = qc.adjoint() * gbx.segment(cn.begin - node.begin, cn.size());
          off += qc.cols();
        }
        rhs += (u - row.qhat[pp] * (row.qhat[pp].adjoint() * u)).squaredNorm();
        for (int s = 0; s < node.nchildren; ++s) self(self, row.basis.child_pair(pp, s));
      };
      descend(descend, p);

      double floor = 1e-12 * gx.norm();
      double denom = std::max(lhs, rhs);
      double mismatch = denom > floor * floor ? std::abs(lhs - rhs) / denom : 0.0;
      rep.max_mismatch = std::max(rep.max_mismatch, mismatch);
      if (mismatch > tol) rep.pass = false;
    }
    ++rep.blocks_checked;
  }
  return rep;
}

StabilityReport verify_stability(const Matrix& h_tree, const DH2Matrix& g, const AdaptiveBasis& row,
                                 int max_blocks, int nvec, std::uint64_t seed) {
  if (g.dim() > 2048) throw std::invalid_argument("verify_stability: dense-oracle guard exceeded");
  const ClusterTree& tree = *g.tree;
  Matrix gt = to_dense_tree(g);

  std::vector<Matrix> qexp(row.basis.n_pairs());
  auto expanded = [&](int p) -> const Matrix& {
    if (qexp[p].size() == 0 && row.basis.rank[p] > 0) qexp[p] = row.basis.expand(p);
    if (qexp[p].size() == 0) qexp[p] = Matrix(tree.nodes[row.basis.cluster_of(p)].size(), 0);
    return qexp[p];
  };

  StabilityReport rep;
  rep.pass = true;

  for (int b : sample_blocks(g.blocks->admissible.size(), max_blocks)) {
    const AdmissibleBlock& blk = g.blocks->admissible[b];
    const ClusterNode& tn = tree.nodes[blk.row];
    const ClusterNode& sn = tree.nodes[blk.col];
    Matrix hb = h_tree.block(tn.begin, sn.begin, tn.size(), sn.size());
    Matrix gb = gt.block(tn.begin, sn.begin, tn.size(), sn.size());
    const Matrix& q = expanded(row.basis.pair_id(blk.row, blk.dir));

    Matrix xs = random_vectors(sn.size(), nvec, seed + static_cast<std::uint64_t>(b));
    for (int j = 0; j < nvec; ++j) {
      Vector hx = hb * xs.col(j);
      Vector gx = gb * xs.col(j);
      double lhs = (hx - q * (q.adjoint() * hx)).norm();
      double rhs = (gx - q * (q.adjoint() * gx)).norm() + (hx - gx).norm();
      double scale = std::max(1e-300, hx.norm());
      double viol = (lhs - rhs) / scale;
      rep.max_triangle_violation = std::max(rep.max_triangle_violation, viol);
      if (viol > 1e-10) rep.pass = false;
    }

    double hnorm = spectral_norm(hb);
    double gnorm = spectral_norm(gb);
    if (hnorm > 0.0 && gnorm > 0.0) {
      double eps_in = spectral_norm(hb - gb) / hnorm;
      double eps_rec = spectral_norm(gb - q * (q.adjoint() * gb)) / gnorm;
      double eps = std::max(eps_in, eps_rec);
      double lhs = spectral_norm(hb - q * (q.adjoint() * hb));
      double slack = lhs - (eps * (2.0 + eps) * hnorm + 1e-10);
      rep.max_bound_violation = std::max(rep.max_bound_violation, slack);
      if (slack > 0.0) rep.pass = false;
    }
    ++rep.blocks_checked;
  }
  return rep;
}

}  // namespace dirh2

#include "dirh2/weights.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dirh2 {

namespace {

// Bottom-up sweep over the full weight factors R_sc. The per-pair callback
// runs once the pair's R is final; with transient = true the R factors of a
// level are dropped as soon as the level above has been processed.
template <typename PerPair>
std::vector<Matrix> full_weight_sweep(const DirectionalClusterBasis& basis, bool transient, bool par,
                                      PerPair&& per_pair) {
  std::vector<Matrix> r(basis.n_pairs());
  const int depth = static_cast<int>(basis.pairs_by_level.size());
  for (int l = depth - 1; l >= 0; --l) {
    const auto& lv = basis.pairs_by_level[l];
    const int m = static_cast<int>(lv.size());
#pragma omp parallel for schedule(dynamic) if (par)
    for (int i = 0; i < m; ++i) {
      int p = lv[i];
      if (basis.is_leaf_pair(p)) {
        r[p] = qr_r_factor(basis.leaf[p]);
      } else {
        const int nch = static_cast<int>(basis.transfer[p].size());
        std::vector<Matrix> rows(nch);
        for (int s = 0; s < nch; ++s) rows[s] = r[basis.child_pair(p, s)] * basis.transfer[p][s];
        r[p] = qr_r_factor(vstack(rows));
      }
      per_pair(p, r[p]);
    }
    if (transient && l + 1 < depth)
      for (int q : basis.pairs_by_level[l + 1]) r[q] = Matrix();
  }
  return r;
}

std::size_t matrix_bytes(const std::vector<Matrix>& ms) {
  std::size_t b = 0;
  for (const Matrix& m : ms) b += sizeof(cplx) * static_cast<std::size_t>(m.size());
  return b;
}

}  // namespace

std::size_t BasisWeights::bytes() const { return matrix_bytes(R); }
std::size_t NormEstimates::bytes() const { return matrix_bytes(N); }
std::size_t CompressedWeights::bytes() const { return matrix_bytes(Rhat); }

BasisWeights basis_weights(const DirectionalClusterBasis& basis, Exec exec) {
  BasisWeights w;
  w.R = full_weight_sweep(basis, false, exec == Exec::parallel, [](int, const Matrix&) {});
  return w;
}

NormEstimates norm_estimates(const DirectionalClusterBasis& basis, int k_norm, Exec exec) {
  if (k_norm < 1) throw std::invalid_argument("norm_estimates: k_norm must be >= 1");
  NormEstimates est;
  est.k_norm = k_norm;
  est.N.resize(basis.n_pairs());
  full_weight_sweep(basis, true, exec == Exec::parallel, [&](int p, const Matrix& r) {
    auto [u, sigma] = left_svd(r);
    int cols = std::min<int>(k_norm, static_cast<int>(u.cols()));
    est.N[p] = u.leftCols(cols).adjoint() * r;
  });
  return est;
}

double BlockOmegas::decay() const { return 1.0 / std::sqrt(max_children + 1.0); }

double BlockOmegas::at_depth(int block, int depth_below) const {
  return base[block] * std::pow(decay(), depth_below);
}

BlockOmegas block_relative_omegas(const DH2Matrix& a, const std::vector<Matrix>& row_factors,
                                  const std::vector<Matrix>& col_factors, Exec exec) {
  BlockOmegas w;
  w.max_children = a.tree->max_children();
  const int nadm = static_cast<int>(a.blocks->admissible.size());
  w.base.resize(nadm);
  const double scale = w.decay();
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int b = 0; b < nadm; ++b) {
    const AdmissibleBlock& blk = a.blocks->admissible[b];
    const Matrix& rf = row_factors[a.row_basis->pair_id(blk.row, blk.dir)];
    const Matrix& cf = col_factors[a.col_basis->pair_id(blk.col, blk.dir)];
    double nrm = spectral_norm(rf * a.coupling[b] * cf.adjoint());
    w.base[b] = std::max(nrm * scale, DBL_MIN);
  }
  return w;
}

CompressedWeights approx_weights(const DH2Matrix& a, double eps_w, const NormEstimates* norms,
                                 bool audit, Exec exec) {
  if (eps_w < 0.0) throw std::invalid_argument("approx_weights: eps_w must be >= 0");
  const DirectionalClusterBasis& basis = *a.col_basis;
  const double scale = 1.0 / std::sqrt(a.tree->max_children() + 1.0);

  CompressedWeights cw;
  cw.eps = eps_w;
  cw.Rhat.resize(basis.n_pairs());
  if (audit) {
    cw.checks.assign(a.blocks->admissible.size(), {});
    cw.projectors.resize(basis.n_pairs());
  }

  full_weight_sweep(basis, true, exec == Exec::parallel, [&](int p, const Matrix& r) {
    auto [s_cluster, dir] = basis.pairs[p];
    auto it = a.blocks->col_blocks.find(pair_key(s_cluster, dir));
    if (it == a.blocks->col_blocks.end()) {
      cw.Rhat[p] = Matrix(0, r.cols());  // weight never used by any block
      return;
    }
    const auto& blist = it->second;
    std::vector<double> omega(blist.size(), 1.0);
    std::vector<Matrix> wblocks(blist.size());
    for (std::size_t i = 0; i < blist.size(); ++i) {
      int b = blist[i];
      const AdmissibleBlock& blk = a.blocks->admissible[b];
      Matrix prod = r * a.coupling[b].adjoint();
      if (norms) {
        const Matrix& n_tc = norms->N[a.row_basis->pair_id(blk.row, blk.dir)];
        omega[i] = std::max(spectral_norm(n_tc * a.coupling[b] * r.adjoint()) * scale, DBL_MIN);
        prod /= omega[i];
      }
      wblocks[i] = std::move(prod);
    }
    Matrix w(r.rows(), 0);
    {
      Eigen::Index cols = 0;
      for (const Matrix& m : wblocks) cols += m.cols();
      w.resize(r.rows(), cols);
      Eigen::Index c0 = 0;
      for (const Matrix& m : wblocks) {
        w.middleCols(c0, m.cols()) = m;
        c0 += m.cols();
      }
    }
    auto [u, sigma] = left_svd(w);
    int rank = truncation_rank(sigma, eps_w);
    Matrix qtilde = u.leftCols(rank);
    cw.Rhat[p] = qtilde.adjoint() * r;
    if (audit) {
      cw.projectors[p] = qtilde;
      for (std::size_t i = 0; i < blist.size(); ++i) {
        Matrix resid = wblocks[i] - qtilde * (qtilde.adjoint() * wblocks[i]);
        cw.checks[blist[i]] = {blist[i], spectral_norm(resid) * omega[i], omega[i]};
      }
    }
  });
  return cw;
}

Matrix total_weight_of_pair(const DH2Matrix& a, int p, const std::vector<Matrix>& col_weights,
                            const BlockOmegas* omegas, bool symmetric, bool columns,
                            const std::vector<Matrix>* all_z) {
  const DirectionalClusterBasis& basis = *a.row_basis;
  auto [t, c] = basis.pairs[p];
  const ClusterNode& tn = a.tree->nodes[t];
  std::vector<Matrix> rows;

  auto push_block = [&](int b, bool adjoint_coupling) {
    const AdmissibleBlock& blk = a.blocks->admissible[b];
    int other = adjoint_coupling ? blk.col : blk.row;
    Matrix m = adjoint_coupling ? Matrix(col_weights[basis.pair_id(other, blk.dir)] * a.coupling[b].adjoint())
                                : Matrix(col_weights[basis.pair_id(other, blk.dir)] * a.coupling[b]);
    if (omegas) m /= omegas->base[b];
    rows.push_back(std::move(m));
  };

  const auto& own = columns ? a.blocks->col_blocks : a.blocks->row_blocks;
  if (auto it = own.find(pair_key(t, c)); it != own.end())
    for (int b : it->second) push_block(b, !columns);
  if (symmetric) {
    // Adjoint blocks folded in so one basis serves rows and columns.
    if (auto it = a.blocks->col_blocks.find(pair_key(t, c)); it != a.blocks->col_blocks.end())
      for (int b : it->second) push_block(b, false);
  }

  if (tn.parent >= 0 && all_z) {
    const double parent_scale = omegas ? 1.0 / omegas->decay() : 1.0;
    for (int pp : basis.pairs_of_cluster[tn.parent]) {
      if (basis.dirs->dirchil(tn.level - 1, basis.dir_of(pp)) != c) continue;
      const Matrix& zp = (*all_z)[pp];
      if (zp.rows() == 0) continue;
      int slot = -1;
      const ClusterNode& pn = a.tree->nodes[tn.parent];
      for (int i = 0; i < pn.nchildren; ++i)
        if (pn.child[i] == t) slot = i;
      rows.push_back(Matrix(parent_scale * zp * basis.transfer[pp][slot].adjoint()));
    }
  }

  if (rows.empty()) return Matrix(0, basis.rank[p]);
  return qr_r_factor(vstack(rows));
}

std::vector<Matrix> total_weights(const DH2Matrix& a, const std::vector<Matrix>& col_weights,
                                  const BlockOmegas* omegas, bool symmetric, bool columns, Exec exec) {
  const DirectionalClusterBasis& basis = *a.row_basis;
  std::vector<Matrix> z(basis.n_pairs());
  const bool par = exec == Exec::parallel;
  for (const auto& lv : basis.pairs_by_level) {
    const int m = static_cast<int>(lv.size());
#pragma omp parallel for schedule(dynamic) if (par)
    for (int i = 0; i < m; ++i)
      z[lv[i]] = total_weight_of_pair(a, lv[i], col_weights, omegas, symmetric, columns, &z);
  }
  return z;
}

std::string weight_stats_csv(const DirectionalClusterBasis& basis, const BasisWeights* full,
                             const CompressedWeights* compressed, const NormEstimates* norms) {
  std::ostringstream os;
  os << "level,direction_count,full_weight_bytes,compressed_weight_bytes,norm_estimate_bytes\n";
  for (std::size_t l = 0; l < basis.pairs_by_level.size(); ++l) {
    std::size_t fb = 0, cb = 0, nb = 0;
    for (int p : basis.pairs_by_level[l]) {
      if (full) fb += sizeof(cplx) * static_cast<std::size_t>(full->R[p].size());
      if (compressed) cb += sizeof(cplx) * static_cast<std::size_t>(compressed->Rhat[p].size());
      if (norms) nb += sizeof(cplx) * static_cast<std::size_t>(norms->N[p].size());
    }
    os << l << ',' << basis.dirs->count(static_cast<int>(l)) << ',' << fb << ',' << cb << ',' << nb << '\n';
  }
  return os.str();
}

}  // namespace dirh2

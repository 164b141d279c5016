#pragma once

#include <string>
#include <vector>

#include "dirh2/dh2.hpp"
#include "dirh2/linalg.hpp"

namespace dirh2 {

// Exact basis weights: per pair (s,c) the triangular factor R_sc of a thin
// Householder factorization of the (expanded) basis matrix V_sc; same
// singular values as V_sc, at most k rows. Kept in storage for the whole
// recompression run, which is exactly the cost the compressed weights avoid.
struct BasisWeights {
  std::vector<Matrix> R;  // aligned with the basis pair registry

  std::size_t bytes() const;
};

BasisWeights basis_weights(const DirectionalClusterBasis& basis, Exec exec = Exec::parallel);

// Norm-estimation matrices N_tc: k_norm rows of R_tc in its dominant left
// singular directions. |N_tc|_2 = |V_tc|_2, and |N_tc S R^*| bounds block
// norms from below. The full R factors only live level by level here.
struct NormEstimates {
  int k_norm = 1;
  std::vector<Matrix> N;

  std::size_t bytes() const;
};

NormEstimates norm_estimates(const DirectionalClusterBasis& basis, int k_norm, Exec exec = Exec::parallel);

// Block-relative scaling weights: at the owning admissible block
// omega_ts = |G|_{t x s}|_2 / sqrt(m+1), divided by sqrt(m+1) again per level
// of descent; m is the maximal child count of the cluster tree. Zero-norm
// blocks are floored at the smallest positive normal double.
struct BlockOmegas {
  std::vector<double> base;  // per admissible block
  int max_children = 2;

  double decay() const;                              // 1/sqrt(m+1)
  double at_depth(int block, int depth_below) const; // omega for a cluster depth_below levels under the owner
};

// Per-block norms |rowF_tc S_ts colF_sc^*|_2: exact when both factors are the
// full weights, a lower bound when a norm estimate or compressed weight is
// substituted on either side.
BlockOmegas block_relative_omegas(const DH2Matrix& a, const std::vector<Matrix>& row_factors,
                                  const std::vector<Matrix>& col_factors, Exec exec = Exec::parallel);

// Compressed basis weights Rhat_sc = Qtilde^* R_sc from the truncated SVD of
// W_sc = R_sc [S_{t1 s}^* ... S_{tm s}^*] over C_sc, scaled by 1/omega_ts per
// block in weighted mode. Full R factors are discarded level by level.
struct CompressedWeights {
  double eps = 0.0;
  std::vector<Matrix> Rhat;  // k_sc x k per pair

  // Construction-time audit trail (optional): per admissible block the
  // residual |(R_sc - Qtilde Qtilde^* R_sc) S_ts^*|_2 and the omega used.
  struct BlockCheck {
    int block = -1;
    double residual = 0.0;
    double omega = 1.0;
  };
  std::vector<BlockCheck> checks;
  std::vector<Matrix> projectors;  // Qtilde per pair, only kept when auditing

  std::size_t bytes() const;
};

// Weighted mode is enabled by passing norm estimates; the scaling uses
// omega_ts = |N_tc S_ts R_sc^*|_2 / sqrt(m+1) with the transient full R_sc.
CompressedWeights approx_weights(const DH2Matrix& a, double eps_w, const NormEstimates* norms,
                                 bool audit = false, Exec exec = Exec::parallel);

// Total weights Z_tc for every pair, top-down: Z_tc is the R factor of the
// stacked [R_sc S_ts^*] blocks over R_tc plus the rescaled parent
// contributions Z_{t+ c+} E_{t c+}^*. col_weights may be exact or compressed.
// columns = true runs the adjoint recursion (column sets, unconjugated S).
std::vector<Matrix> total_weights(const DH2Matrix& a, const std::vector<Matrix>& col_weights,
                                  const BlockOmegas* omegas = nullptr, bool symmetric = false,
                                  bool columns = false, Exec exec = Exec::parallel);

// Single-pair variant used by the recompression recursion; parent_z returns
// the already computed Z of a parent pair (nullptr when absent).
Matrix total_weight_of_pair(const DH2Matrix& a, int p, const std::vector<Matrix>& col_weights,
                            const BlockOmegas* omegas, bool symmetric, bool columns,
                            const std::vector<Matrix>* all_z);

// Per-level CSV: level,direction_count,full_weight_bytes,compressed_weight_bytes,norm_estimate_bytes
std::string weight_stats_csv(const DirectionalClusterBasis& basis, const BasisWeights* full,
                             const CompressedWeights* compressed, const NormEstimates* norms);

}  // namespace dirh2

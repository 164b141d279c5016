#pragma once

#include <string>
#include <vector>

#include "dirh2/weights.hpp"

namespace dirh2 {

enum class TruncationMode { absolute, block_relative };

struct TruncationControl {
  double eps = 1e-4;
  TruncationMode mode = TruncationMode::absolute;
  int max_rank = -1;  // < 0: uncapped
};

// Adaptive isometric cluster basis: leaf matrices are the kept left singular
// vectors, transfer matrices are row blocks of the small stacked factors
// Qhat. T_tc = Q_tc^* V_tc records the change of basis; the full singular
// spectra stay around so every truncation is auditable.
struct AdaptiveBasis {
  DirectionalClusterBasis basis;
  std::vector<Matrix> T;
  std::vector<Matrix> qhat;             // non-leaf pairs only
  std::vector<RealVector> spectra;

  // Per pair: level,cluster_size,k,k_tc,sigma_kept,sigma_dropped
  std::string rank_report_csv() const;
};

// Top-down recursion computing the total weights on the fly (each Z lives
// until its children and the owning SVD consumed it), then truncated SVDs of
// V_tc Z_tc^* (leaves) resp. Vhat_tc Z_tc^* (non-leaves, children projected
// first). In block-relative mode the stacks are omega-scaled and the same
// eps yields |G| - QQ*G| |_2 <= eps |G| |_2 per admissible block.
// columns = true builds the column basis by the adjoint pass.
AdaptiveBasis build_adaptive_basis(const DH2Matrix& a, const std::vector<Matrix>& col_weights,
                                   const TruncationControl& ctrl, const BlockOmegas* omegas = nullptr,
                                   bool symmetric = false, bool columns = false,
                                   Exec exec = Exec::parallel);

// Projected matrix: couplings T_tc S_ts T_sc^*, nearfield copied. Pass the
// same AdaptiveBasis twice to share one basis between rows and columns.
DH2Matrix project_couplings(const DH2Matrix& a, const AdaptiveBasis& row, const AdaptiveBasis& col);

struct ErrorRepReport {
  int blocks_checked = 0;
  int vectors_per_block = 0;
  double max_mismatch = 0.0;  // relative Pythagoras defect
  bool pass = false;
};

// Checks the exact error decomposition: for sampled admissible blocks and
// random vectors, the squared projection error equals the sum of the
// per-descendant contributions.
ErrorRepReport verify_error_representation(const DH2Matrix& a, const AdaptiveBasis& row, double tol,
                                           int max_blocks = 64, int nvec = 20,
                                           std::uint64_t seed = 17);

struct StabilityReport {
  int blocks_checked = 0;
  double max_triangle_violation = 0.0;  // relative; <= O(roundoff) when the bound holds
  double max_bound_violation = 0.0;     // slack of eps(2+eps) bound; <= 0 when it holds
  bool pass = false;
};

// h_tree is the target matrix in tree order; g is the compressed surrogate.
// Verifies the projection-error triangle inequality on random vectors and the
// eps(2+eps) end-to-end bound with the measured blockwise input error.
StabilityReport verify_stability(const Matrix& h_tree, const DH2Matrix& g, const AdaptiveBasis& row,
                                 int max_blocks = 64, int nvec = 20, std::uint64_t seed = 19);

}  // namespace dirh2

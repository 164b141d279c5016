#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dirh2/cluster_basis.hpp"

namespace dirh2 {

// DH2-matrix: directional row/column cluster bases (aliased for the plain
// interpolation operator, distinct after recompression), one coupling matrix
// per admissible leaf and one dense matrix per inadmissible leaf. Immutable
// after assembly; concurrent matvecs on a shared instance are safe.
struct DH2Matrix {
  const ClusterTree* tree = nullptr;
  const DirectionFamily* dirs = nullptr;
  const DirectedBlockTree* blocks = nullptr;
  std::shared_ptr<const DirectionalClusterBasis> row_basis, col_basis;
  std::vector<Matrix> coupling;    // aligned with blocks->admissible
  std::vector<Matrix> nearfield;   // aligned with blocks->inadmissible
  std::vector<std::vector<int>> nearfield_of_row;  // row cluster -> inadmissible indices
  std::vector<std::vector<int>> nearfield_of_col;  // col cluster -> inadmissible indices

  int dim() const { return tree ? tree->n_points() : 0; }
};

// Fills leaf/transfer matrices by directional interpolation, couplings with
// modified-kernel evaluations at interpolation points, and nearfield blocks
// with exact kernel values (coincident points contribute 0).
DH2Matrix assemble_dh2(const ClusterTree& tree, const DirectionFamily& dirs,
                       const DirectedBlockTree& blocks, int order, const HelmholtzKernel& kernel,
                       Exec exec = Exec::parallel);

// Three-phase fast multiplication: forward transform up the column basis,
// couplings, backward transform down the row basis, plus the nearfield.
Vector matvec(const DH2Matrix& a, const Vector& x, Exec exec = Exec::parallel);

// y = A^* x without forming the adjoint: swapped bases, adjoint couplings
// and nearfield blocks.
Vector matvec_adjoint(const DH2Matrix& a, const Vector& x, Exec exec = Exec::parallel);

// Dense reconstruction in original point order; guard n <= 16384.
Matrix to_dense(const DH2Matrix& a);

// Dense reconstruction in tree order (clusters are contiguous index ranges).
Matrix to_dense_tree(const DH2Matrix& a);

// Exact kernel matrix with zeroed coincident-point entries.
Matrix exact_kernel_dense_tree(const ClusterTree& tree, const HelmholtzKernel& kernel);
Matrix exact_kernel_dense(const ClusterTree& tree, const HelmholtzKernel& kernel);

struct StorageReport {
  std::size_t leaf = 0, transfer = 0, coupling = 0, nearfield = 0, weights = 0;

  std::size_t total() const { return leaf + transfer + coupling + nearfield + weights; }
  std::size_t basis_and_coupling() const { return leaf + transfer + coupling; }
  std::string csv() const;  // rows: category,bytes
};

StorageReport storage_report(const DH2Matrix& a, std::size_t weight_bytes = 0);

}  // namespace dirh2

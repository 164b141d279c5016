#pragma once

#include <utility>
#include <vector>

#include "dirh2/types.hpp"

namespace dirh2 {

// R factor of the thin Householder QR: min(rows, cols) x cols, upper trapezoidal.
Matrix qr_r_factor(const Matrix& m);

// Rows stacked on top of each other; all blocks share the column count.
Matrix vstack(const std::vector<Matrix>& blocks);

// Left singular vectors and singular values. Wide inputs are condensed by a
// Householder factorization of the adjoint first, so no accuracy is lost to
// normal-equation squaring.
std::pair<Matrix, RealVector> left_svd(const Matrix& m);

RealVector singular_values(const Matrix& m);

double spectral_norm(const Matrix& m);

// Smallest rank q such that sigma_{q+1} <= eps, counting sigma past the end
// as zero; optionally capped.
int truncation_rank(const RealVector& sigma, double eps, int max_rank = -1);

}  // namespace dirh2

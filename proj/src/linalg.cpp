#include "dirh2/linalg.hpp"

#include <algorithm>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace dirh2 {

Matrix qr_r_factor(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(std::min(m.rows(), m.cols()), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  Eigen::Index k = std::min(m.rows(), m.cols());
  return Matrix(qr.matrixQR().topRows(k).triangularView<Eigen::Upper>());
}

Matrix vstack(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const Matrix& b : blocks) {
    rows += b.rows();
    cols = std::max(cols, b.cols());
  }
  Matrix m(rows, cols);
  Eigen::Index r = 0;
  for (const Matrix& b : blocks) {
    m.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return m;
}

std::pair<Matrix, RealVector> left_svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return {Matrix(m.rows(), 0), RealVector(0)};
  if (m.cols() > m.rows()) {
    Matrix rt = qr_r_factor(m.adjoint());  // m = rt^* q^*
    Eigen::JacobiSVD<Matrix> svd(rt.adjoint(), Eigen::ComputeThinU);
    return {svd.matrixU(), svd.singularValues()};
  }
  if (m.rows() > 64 && m.cols() > 32) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    return {svd.matrixU(), svd.singularValues()};
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  return {svd.matrixU(), svd.singularValues()};
}

RealVector singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return RealVector(0);
  if (m.cols() > m.rows()) return singular_values(Matrix(m.adjoint()));
  if (m.rows() > 128) {
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

double spectral_norm(const Matrix& m) {
  RealVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

int truncation_rank(const RealVector& sigma, double eps, int max_rank) {
  int q = 0;
  while (q < sigma.size() && sigma(q) > eps) ++q;
  if (max_rank >= 0) q = std::min(q, max_rank);
  return q;
}

}  // namespace dirh2

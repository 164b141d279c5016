#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace dirh2 {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Execution policy for the data-parallel kernels. Every parallel kernel has
// a serial twin that produces bit-identical results; tests compare the two.
enum class Exec { serial, parallel };

// Packs a (cluster, direction) pair into a hash key. Direction counts stay
// far below 2^20 even for the largest direction sets we generate.
inline std::uint64_t pair_key(int cluster, int dir) {
  return (static_cast<std::uint64_t>(cluster) << 20) | static_cast<std::uint64_t>(dir);
}

}  // namespace dirh2

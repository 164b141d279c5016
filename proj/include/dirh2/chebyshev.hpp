#pragma once

#include <array>
#include <vector>

#include "dirh2/geometry.hpp"
#include "dirh2/types.hpp"

namespace dirh2 {

// Tensor interpolation rule on a box: Chebyshev points of the first kind per
// axis, k = order^3 points, barycentric Lagrange evaluation. A degenerate box
// axis collapses that axis to its single coordinate with a constant basis.
struct InterpRule {
  int order = 0;
  Box3 box;
  std::array<std::vector<double>, 3> nodes;      // per-axis nodes inside the box
  std::array<std::vector<double>, 3> weights;    // barycentric weights
  std::array<bool, 3> degenerate{false, false, false};

  int k() const { return order * order * order; }

  // Tensor point xi_nu, nu = i0 + order*i1 + order^2*i2.
  Point3 point(int nu) const;

  // All k Lagrange values l_nu(x).
  RealVector lagrange(const Point3& x) const;
};

InterpRule chebyshev_rule(const Box3& box, int order);

}  // namespace dirh2

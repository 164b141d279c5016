#pragma once

#include "dirh2/geometry.hpp"
#include "dirh2/types.hpp"

namespace dirh2 {

// Helmholtz kernel g(x,y) = exp(i*kappa*|x-y|) / (4*pi*|x-y|) and its
// directional modification g_c with the plane wave in direction c divided out.
struct HelmholtzKernel {
  double kappa = 0.0;

  // Throws on coincident points (singular).
  cplx operator()(const Point3& x, const Point3& y) const;

  // g_c(x,y) = exp(i*kappa*(|x-y| - <c,x-y>)) / (4*pi*|x-y|); c = 0 gives g.
  cplx directional(const Point3& x, const Point3& y, const Point3& c) const;
};

}  // namespace dirh2

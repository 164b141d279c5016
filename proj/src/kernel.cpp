#include "dirh2/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dirh2 {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

cplx HelmholtzKernel::operator()(const Point3& x, const Point3& y) const {
  Point3 d = x - y;
  double r = norm(d);
  if (r == 0.0) throw std::invalid_argument("HelmholtzKernel: singular evaluation at x = y");
  return std::polar(1.0 / (kFourPi * r), kappa * r);
}

cplx HelmholtzKernel::directional(const Point3& x, const Point3& y, const Point3& c) const {
  Point3 d = x - y;
  double r = norm(d);
  if (r == 0.0) throw std::invalid_argument("HelmholtzKernel: singular evaluation at x = y");
  return std::polar(1.0 / (kFourPi * r), kappa * (r - dot(c, d)));
}

}  // namespace dirh2

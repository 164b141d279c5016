#include "dirh2/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dirh2 {

namespace {

// One axis of the barycentric formula; exact indicator when x hits a node.
void axis_lagrange(const std::vector<double>& nodes, const std::vector<double>& weights, bool degenerate,
                   double x, std::vector<double>& out) {
  std::size_t m = nodes.size();
  out.assign(m, 0.0);
  if (degenerate) {
    out[0] = 1.0;
    return;
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double d = x - nodes[j];
    if (d == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = 1.0;
      return;
    }
    out[j] = weights[j] / d;
    denom += out[j];
  }
  for (std::size_t j = 0; j < m; ++j) out[j] /= denom;
}

}  // namespace

Point3 InterpRule::point(int nu) const {
  int i0 = nu % order;
  int i1 = (nu / order) % order;
  int i2 = nu / (order * order);
  return {nodes[0][i0], nodes[1][i1], nodes[2][i2]};
}

RealVector InterpRule::lagrange(const Point3& x) const {
  std::vector<double> lx, ly, lz;
  axis_lagrange(nodes[0], weights[0], degenerate[0], x.x, lx);
  axis_lagrange(nodes[1], weights[1], degenerate[1], x.y, ly);
  axis_lagrange(nodes[2], weights[2], degenerate[2], x.z, lz);
  RealVector v(k());
  int nu = 0;
  for (int i2 = 0; i2 < order; ++i2)
    for (int i1 = 0; i1 < order; ++i1)
      for (int i0 = 0; i0 < order; ++i0) v(nu++) = lx[i0] * ly[i1] * lz[i2];
  return v;
}

InterpRule chebyshev_rule(const Box3& box, int order) {
  if (order < 1) throw std::invalid_argument("chebyshev_rule: order must be >= 1");
  InterpRule rule;
  rule.order = order;
  rule.box = box;
  for (int axis = 0; axis < 3; ++axis) {
    double a = box.lower[axis];
    double b = box.upper[axis];
    rule.nodes[axis].resize(order);
    rule.weights[axis].resize(order);
    rule.degenerate[axis] = (b - a) <= 0.0;
    for (int j = 0; j < order; ++j) {
      double theta = (2.0 * j + 1.0) * std::numbers::pi / (2.0 * order);
      double ref = std::cos(theta);  // descending in j
      rule.nodes[axis][j] = rule.degenerate[axis] ? a : a + 0.5 * (b - a) * (ref + 1.0);
      // First-kind barycentric weights up to a common factor.
      rule.weights[axis][j] = ((j % 2 == 0) ? 1.0 : -1.0) * std::sin(theta);
    }
  }
  return rule;
}

}  // namespace dirh2

#include "dirh2/directions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace dirh2 {

namespace {

Point3 unit(const Point3& p) {
  double n = norm(p);
  return {p.x / n, p.y / n, p.z / n};
}

}  // namespace

std::vector<Point3> cube_surface_directions(int u) {
  std::vector<Point3> dirs;
  dirs.reserve(6u * static_cast<std::size_t>(u) * static_cast<std::size_t>(u));
  const double h = 2.0 / u;
  // Faces in fixed order: +x, -x, +y, -y, +z, -z; cells row-major per face.
  for (int face = 0; face < 6; ++face) {
    int axis = face / 2;
    double sign = (face % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < u; ++i) {
      for (int j = 0; j < u; ++j) {
        double a = -1.0 + (i + 0.5) * h;
        double b = -1.0 + (j + 0.5) * h;
        Point3 p;
        if (axis == 0) p = {sign, a, b};
        else if (axis == 1) p = {a, sign, b};
        else p = {a, b, sign};
        dirs.push_back(unit(p));
      }
    }
  }
  return dirs;
}

double covering_radius(std::span<const Point3> dirs, int samples_per_face) {
  double worst = 0.0;
  const double h = 2.0 / samples_per_face;
  for (int face = 0; face < 6; ++face) {
    int axis = face / 2;
    double sign = (face % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i <= samples_per_face; ++i) {
      for (int j = 0; j <= samples_per_face; ++j) {
        double a = -1.0 + i * h;
        double b = -1.0 + j * h;
        Point3 p;
        if (axis == 0) p = {sign, a, b};
        else if (axis == 1) p = {a, sign, b};
        else p = {a, b, sign};
        Point3 q = unit(p);
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& c : dirs) best = std::min(best, norm(q - c));
        worst = std::max(worst, best);
      }
    }
  }
  return worst;
}

DirectionFamily build_directions(const ClusterTree& tree, double kappa, double eta2) {
  if (kappa < 0.0) throw std::invalid_argument("build_directions: kappa must be >= 0");
  if (eta2 <= 0.0) throw std::invalid_argument("build_directions: eta2 must be > 0");

  DirectionFamily fam;
  int depth = tree.depth();
  fam.level_dirs.resize(depth);
  fam.trivial.resize(depth);

  for (int l = 0; l < depth; ++l) {
    double dmax = 0.0;
    for (int c : tree.levels[l]) dmax = std::max(dmax, diam(tree.nodes[c].box));
    if (kappa * dmax <= eta2) {
      fam.level_dirs[l] = {Point3{0.0, 0.0, 0.0}};
      fam.trivial[l] = true;
    } else {
      double bound = eta2 / (kappa * dmax);
      int u = 1;
      while (2.0 / u > bound) u *= 2;
      fam.level_dirs[l] = cube_surface_directions(u);
      fam.trivial[l] = false;
    }
  }

  // Nearest child-level direction for every parent direction, ties broken by
  // the lowest index (minCoeff scans forward).
  fam.child_map.resize(depth > 0 ? depth - 1 : 0);
  for (int l = 0; l + 1 < depth; ++l) {
    const auto& parent = fam.level_dirs[l];
    const auto& child = fam.level_dirs[l + 1];
    Eigen::Matrix3Xd cm(3, child.size());
    for (std::size_t d = 0; d < child.size(); ++d) cm.col(d) = Eigen::Vector3d(child[d].x, child[d].y, child[d].z);
    fam.child_map[l].resize(parent.size());
    const int np = static_cast<int>(parent.size());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < np; ++c) {
      Eigen::Vector3d q(parent[c].x, parent[c].y, parent[c].z);
      Eigen::Index best = 0;
      (cm.colwise() - q).colwise().squaredNorm().minCoeff(&best);
      fam.child_map[l][c] = static_cast<int>(best);
    }
  }
  return fam;
}

}  // namespace dirh2

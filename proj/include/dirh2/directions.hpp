#pragma once

#include <vector>

#include "dirh2/cluster_tree.hpp"
#include "dirh2/geometry.hpp"

namespace dirh2 {

// Level-wise direction family. Levels where the resolution condition already
// holds with c = 0 carry the singleton {0}; all other levels carry unit
// vectors obtained by projecting the cell centers of a subdivided cube
// surface onto the sphere.
struct DirectionFamily {
  std::vector<std::vector<Point3>> level_dirs;
  std::vector<bool> trivial;             // level carries {0}
  std::vector<std::vector<int>> child_map;  // child_map[l][c]: nearest direction on level l+1

  int count(int level) const { return static_cast<int>(level_dirs[level].size()); }
  const Point3& direction(int level, int c) const { return level_dirs[level][c]; }
  // Direction assigned to the children of a level-l cluster for parent direction c.
  int dirchil(int level, int c) const { return child_map[level][c]; }
};

// 6*u^2 unit vectors: centers of the u x u cells of each face of [-1,1]^3,
// projected to the sphere. Deterministic face/cell enumeration order.
std::vector<Point3> cube_surface_directions(int u);

// Largest distance from any unit vector to the nearest member of dirs,
// estimated by sampling; used by tests to audit the resolution bound.
double covering_radius(std::span<const Point3> dirs, int samples_per_face = 64);

// Per level: {0} when kappa * max cluster diameter <= eta2, otherwise the
// cube-surface set with subdivision u chosen as the smallest power of two
// such that 2/u <= eta2 / (kappa * diam); the projected cells then resolve
// every unit vector to within the required width.
DirectionFamily build_directions(const ClusterTree& tree, double kappa, double eta2);

}  // namespace dirh2

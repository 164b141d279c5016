#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dirh2 {

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Point3 operator+(const Point3& p) const { return {x + p.x, y + p.y, z + p.z}; }
  Point3 operator-(const Point3& p) const { return {x - p.x, y - p.y, z - p.z}; }
  Point3 operator*(double a) const { return {a * x, a * y, a * z}; }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

double dot(const Point3& a, const Point3& b);
double norm(const Point3& p);

// Axis-parallel bounding box, lower <= upper componentwise.
struct Box3 {
  Point3 lower, upper;

  Point3 center() const { return {0.5 * (lower.x + upper.x), 0.5 * (lower.y + upper.y), 0.5 * (lower.z + upper.z)}; }
  double width(int axis) const { return upper[axis] - lower[axis]; }
  int longest_axis() const;
};

// Minimal axis-parallel box containing all points. Throws on empty input.
Box3 bounding_box(std::span<const Point3> points);

// Euclidean length of the box diagonal.
double diam(const Box3& b);

// Componentwise gap distance between two boxes, 0 if they overlap.
double dist(const Box3& a, const Box3& b);

struct SpherePointSet {
  std::vector<Point3> points;
  int subdivision = 0;     // 0 for random clouds
  std::uint64_t seed = 0;  // 0 for meshed clouds
};

// Refines each face of the double pyramid |x|+|y|+|z| = 1 into m^2 triangles
// and projects the triangle centroids onto the unit sphere; 8*m^2 points.
SpherePointSet make_sphere_cloud(int m);

// n points drawn uniformly from the unit sphere with a fixed seed.
SpherePointSet random_sphere_cloud(std::size_t n, std::uint64_t seed);

// Plain-text XYZ interchange, one "x y z" per line.
void write_xyz(const std::string& path, std::span<const Point3> points);
std::vector<Point3> read_xyz(const std::string& path);

}  // namespace dirh2

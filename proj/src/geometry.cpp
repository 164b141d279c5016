#include "dirh2/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace dirh2 {

double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Point3& p) { return std::sqrt(dot(p, p)); }

int Box3::longest_axis() const {
  int axis = 0;
  double w = width(0);
  for (int i = 1; i < 3; ++i) {
    if (width(i) > w) {
      w = width(i);
      axis = i;
    }
  }
  return axis;
}

Box3 bounding_box(std::span<const Point3> points) {
  if (points.empty()) throw std::invalid_argument("bounding_box: empty point set");
  Box3 b{points[0], points[0]};
  for (const Point3& p : points) {
    b.lower.x = std::min(b.lower.x, p.x);
    b.lower.y = std::min(b.lower.y, p.y);
    b.lower.z = std::min(b.lower.z, p.z);
    b.upper.x = std::max(b.upper.x, p.x);
    b.upper.y = std::max(b.upper.y, p.y);
    b.upper.z = std::max(b.upper.z, p.z);
  }
  return b;
}

double diam(const Box3& b) { return norm(b.upper - b.lower); }

double dist(const Box3& a, const Box3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    double gap = std::max({0.0, a.lower[i] - b.upper[i], b.lower[i] - a.upper[i]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

namespace {

Point3 normalized(const Point3& p) {
  double n = norm(p);
  return {p.x / n, p.y / n, p.z / n};
}

}  // namespace

SpherePointSet make_sphere_cloud(int m) {
  if (m < 1) throw std::invalid_argument("make_sphere_cloud: subdivision must be >= 1");
  SpherePointSet cloud;
  cloud.subdivision = m;
  cloud.points.reserve(8u * static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  const double step = 1.0 / m;
  for (double sx : {1.0, -1.0}) {
    for (double sy : {1.0, -1.0}) {
      for (double sz : {1.0, -1.0}) {
        // Face with vertices (sx,0,0), (0,sy,0), (0,0,sz); barycentric lattice
        // vertex(i,j) = A + i/m*(B-A) + j/m*(C-A).
        const Point3 a{sx, 0.0, 0.0};
        const Point3 ab{-sx, sy, 0.0};
        const Point3 ac{-sx, 0.0, sz};
        auto vertex = [&](int i, int j) { return a + ab * (i * step) + ac * (j * step); };
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m - i; ++j) {
            Point3 up = (vertex(i, j) + vertex(i + 1, j) + vertex(i, j + 1)) * (1.0 / 3.0);
            cloud.points.push_back(normalized(up));
            if (i + j < m - 1) {
              Point3 down = (vertex(i + 1, j) + vertex(i + 1, j + 1) + vertex(i, j + 1)) * (1.0 / 3.0);
              cloud.points.push_back(normalized(down));
            }
          }
        }
      }
    }
  }
  return cloud;
}

SpherePointSet random_sphere_cloud(std::size_t n, std::uint64_t seed) {
  SpherePointSet cloud;
  cloud.seed = seed;
  cloud.points.reserve(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (cloud.points.size() < n) {
    Point3 p{gauss(rng), gauss(rng), gauss(rng)};
    if (norm(p) < 1e-6) continue;
    cloud.points.push_back(normalized(p));
  }
  return cloud;
}

void write_xyz(const std::string& path, std::span<const Point3> points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_xyz: cannot open " + path);
  out.precision(17);
  for (const Point3& p : points) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
}

std::vector<Point3> read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_xyz: cannot open " + path);
  std::vector<Point3> points;
  Point3 p;
  while (in >> p.x >> p.y >> p.z) points.push_back(p);
  return points;
}

}  // namespace dirh2

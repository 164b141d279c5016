#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "dirh2/geometry.hpp"
#include "doctest.h"

using namespace dirh2;

TEST_CASE("sphere cloud sizes and octant coverage") {
  CHECK(make_sphere_cloud(16).points.size() == 2048);
  CHECK(make_sphere_cloud(4).points.size() == 128);

  SpherePointSet base = make_sphere_cloud(1);
  REQUIRE(base.points.size() == 8);
  // One centroid per octant face.
  std::array<bool, 8> seen{};
  for (const Point3& p : base.points) {
    int o = (p.x > 0 ? 1 : 0) | (p.y > 0 ? 2 : 0) | (p.z > 0 ? 4 : 0);
    seen[o] = true;
  }
  for (bool s : seen) CHECK(s);

  CHECK_THROWS(make_sphere_cloud(0));
}

TEST_CASE("sphere cloud points lie on the unit sphere") {
  for (int m : {1, 4, 16}) {
    for (const Point3& p : make_sphere_cloud(m).points) CHECK(std::abs(norm(p) - 1.0) <= 1e-12);
  }
  for (const Point3& p : random_sphere_cloud(257, 42).points) CHECK(std::abs(norm(p) - 1.0) <= 1e-12);
}

TEST_CASE("bounding box basics") {
  std::vector<Point3> pts{{0, 0, 0}, {1, 2, 3}};
  Box3 b = bounding_box(pts);
  CHECK(b.lower.x == 0.0);
  CHECK(b.upper.x == 1.0);
  CHECK(b.upper.y == 2.0);
  CHECK(b.upper.z == 3.0);

  std::vector<Point3> single{{0.5, -1.0, 2.0}};
  Box3 d = bounding_box(single);
  CHECK(diam(d) == 0.0);

  CHECK_THROWS(bounding_box(std::span<const Point3>{}));
}

TEST_CASE("bounding box is minimal on a random cloud") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Point3> pts(100);
  for (Point3& p : pts) p = {u(rng), u(rng), u(rng)};
  Box3 b = bounding_box(pts);

  for (const Point3& p : pts) {
    for (int ax = 0; ax < 3; ++ax) {
      CHECK(p[ax] >= b.lower[ax]);
      CHECK(p[ax] <= b.upper[ax]);
    }
  }
  // Shrinking any face by 1e-9 must exclude at least one point.
  for (int ax = 0; ax < 3; ++ax) {
    bool low_touched = false, high_touched = false;
    for (const Point3& p : pts) {
      if (p[ax] < b.lower[ax] + 1e-9) low_touched = true;
      if (p[ax] > b.upper[ax] - 1e-9) high_touched = true;
    }
    CHECK(low_touched);
    CHECK(high_touched);
  }
}

TEST_CASE("diam and dist") {
  Box3 unit{{0, 0, 0}, {1, 1, 1}};
  Box3 far{{3, 3, 3}, {4, 4, 4}};
  CHECK(diam(unit) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(dist(unit, far) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(dist(unit, unit) == 0.0);

  // Box distance lower-bounds the center distance.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int it = 0; it < 50; ++it) {
    Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    Point3 c{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
    Box3 b1 = bounding_box(std::vector<Point3>{a, b});
    Box3 b2 = bounding_box(std::vector<Point3>{c, d});
    CHECK(dist(b1, b2) <= norm(b1.center() - b2.center()) + 1e-14);
  }
}

TEST_CASE("pairwise distances bounded by bounding box diameter") {
  SpherePointSet cloud = random_sphere_cloud(60, 9);
  Box3 b = bounding_box(cloud.points);
  for (const Point3& p : cloud.points)
    for (const Point3& q : cloud.points) CHECK(norm(p - q) <= diam(b) + 1e-14);
}

TEST_CASE("xyz roundtrip") {
  SpherePointSet cloud = random_sphere_cloud(33, 11);
  auto path = std::filesystem::temp_directory_path() / "dirh2_test_cloud.xyz";
  write_xyz(path.string(), cloud.points);
  std::vector<Point3> back = read_xyz(path.string());
  REQUIRE(back.size() == cloud.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].x == cloud.points[i].x);
    CHECK(back[i].y == cloud.points[i].y);
    CHECK(back[i].z == cloud.points[i].z);
  }
  std::filesystem::remove(path);
  CHECK_THROWS(read_xyz("/nonexistent/dirh2.xyz"));
}

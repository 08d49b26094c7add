#include "doctest.h"

#include "oracles.hpp"
#include "vacufix/raycast.hpp"
#include "vacufix/shapes.hpp"

#include <random>

using namespace vacufix;

TEST_CASE("vertical ray through the unit cube hits bottom and top") {
  const TriMesh cube = shapes::box(Vec3::Zero(), Vec3::Ones());
  const auto hits = raycast_all_hits(cube, Ray(Vec3(0.5, 0.5, -1.0), Vec3::UnitZ()));
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].point.z() == doctest::Approx(0.0));
  CHECK(hits[1].point.z() == doctest::Approx(1.0));
  CHECK(hits[0].t == doctest::Approx(1.0));
  CHECK(hits[0].facet_normal.isApprox(-Vec3::UnitZ()));
}

TEST_CASE("ray outside the bbox misses") {
  const TriMesh cube = shapes::box(Vec3::Zero(), Vec3::Ones());
  CHECK(raycast_all_hits(cube, Ray(Vec3(3.0, 0.5, -1.0), Vec3::UnitZ())).empty());
  CHECK_FALSE(raycast_first_hit(cube, Ray(Vec3(3.0, 0.5, -1.0), Vec3::UnitZ())).has_value());
}

TEST_CASE("hollow box yields four ordered hits equal to the brute-force oracle") {
  const TriMesh shell = shapes::hollow_box(Vec3::Zero(), Vec3(10, 10, 10), 2.0);
  const Vec3 origin(5.3, 4.1, -5.0);
  const auto hits = raycast_all_hits(shell, Ray(origin, Vec3::UnitZ()));
  const auto expected = oracle::brute_force_hits(shell, origin, Vec3::UnitZ());
  REQUIRE(hits.size() == 4);
  REQUIRE(expected.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(hits[i].t - expected[i]) < 1e-6);
  }
  CHECK(hits[0].point.z() == doctest::Approx(0.0));
  CHECK(hits[1].point.z() == doctest::Approx(2.0));
  CHECK(hits[2].point.z() == doctest::Approx(8.0));
  CHECK(hits[3].point.z() == doctest::Approx(10.0));
}

TEST_CASE("shared-edge hit is reported once") {
  // The cube's bottom face is split along its diagonal; aim at the diagonal.
  const TriMesh cube = shapes::box(Vec3::Zero(), Vec3(2, 2, 2));
  for (const double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const auto hits = raycast_all_hits(cube, Ray(Vec3(s, s, -1.0), Vec3::UnitZ()));
    CHECK(hits.size() == 2);
  }
  const auto corner = raycast_all_hits(cube, Ray(Vec3(0, 0, -1), Vec3::UnitZ()));
  CHECK(corner.size() == 2);
}

TEST_CASE("occlusion queries") {
  const TriMesh cube = shapes::box(Vec3::Zero(), Vec3(10, 10, 10));
  SUBCASE("bottom face is visible from below") {
    CHECK_FALSE(raycast_occluded(cube, Vec3(5, 5, 0), -Vec3::UnitZ()));
  }
  SUBCASE("point on a surface does not occlude itself") {
    CHECK_FALSE(raycast_occluded(cube, Vec3(5, 5, 10), Vec3::UnitZ(), 1e-3));
    CHECK(raycast_occluded(cube, Vec3(5, 5, 10), -Vec3::UnitZ(), 1e-3));
  }
  SUBCASE("shelf inside a closed box has a floor beneath it") {
    const TriMesh mesh = shapes::merged({shapes::hollow_box(Vec3::Zero(), Vec3(40, 40, 40), 2.0),
                                         shapes::box(Vec3(10, 10, 15), Vec3(30, 30, 18))});
    CHECK(raycast_occluded(mesh, Vec3(20, 20, 18), -Vec3::UnitZ()));
  }
}

TEST_CASE("hit records satisfy point = origin + t * direction") {
  const TriMesh sphere = shapes::uv_sphere(Vec3(0, 0, 0), 30.0, 20, 32);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 origin(60 * u(rng), 60 * u(rng), 60 * u(rng));
    const Vec3 dir = (Vec3(10 * u(rng), 10 * u(rng), 10 * u(rng)) - origin).normalized();
    const Ray ray(origin, dir);
    for (const auto& hit : raycast_all_hits(sphere, ray)) {
      CHECK(hit.t >= 0.0);
      CHECK((hit.point - (origin + hit.t * dir)).norm() < 1e-6);
    }
  }
}

TEST_CASE("property: BVH traversal equals the brute-force all-triangle oracle") {
  const std::vector<TriMesh> meshes{
      shapes::uv_sphere(Vec3(5, -3, 40), 35.0, 24, 40),
      shapes::hollow_box(Vec3(-20, -20, 0), Vec3(20, 20, 30), 3.0),
      shapes::appliance_housing(),
      shapes::grooved_plate(120, 80, 15, 50, 60, 3),
  };
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& mesh : meshes) {
    const Box3& box = mesh.bbox();
    const Vec3 lo = box.min() - 0.2 * box.sizes();
    const Vec3 span = 1.4 * box.sizes();
    int total_hits = 0;
    for (int i = 0; i < 400; ++i) {
      const Vec3 origin = lo + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(span);
      const Vec3 target = box.min() + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(box.sizes());
      const Vec3 dir = (target - origin).normalized();
      const auto hits = raycast_all_hits(mesh, Ray(origin, dir));
      const auto expected = oracle::brute_force_hits(mesh, origin, dir);
      REQUIRE(hits.size() == expected.size());
      for (std::size_t k = 0; k < hits.size(); ++k) {
        CHECK(std::abs(hits[k].t - expected[k]) < 1e-6);
        if (k > 0) {
          CHECK(hits[k].t > hits[k - 1].t);
        }
      }
      total_hits += static_cast<int>(hits.size());
    }
    CHECK(total_hits > 0);
  }
}

TEST_CASE("property: vertical rays through watertight solids hit an even number of times") {
  const std::vector<TriMesh> meshes{shapes::uv_sphere(Vec3::Zero(), 25.0, 18, 30), shapes::appliance_housing(),
                                    shapes::stepped_plate(90, 40, 12, 33.3, 4.0)};
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& mesh : meshes) {
    REQUIRE(mesh.watertight());
    const Box3& box = mesh.bbox();
    for (int i = 0; i < 500; ++i) {
      const Vec3 origin(box.min().x() + u(rng) * box.sizes().x(), box.min().y() + u(rng) * box.sizes().y(),
                        box.min().z() - 1.0);
      CHECK(raycast_all_hits(mesh, Ray(origin, Vec3::UnitZ())).size() % 2 == 0);
    }
  }
}

TEST_CASE("rays lying in a face plane are not counted against that face") {
  const TriMesh plate = shapes::box(Vec3::Zero(), Vec3(100, 100, 20));
  const auto hits = raycast_all_hits(plate, Ray(Vec3(0, 37, -1), Vec3::UnitZ()));
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].point.z() == 0.0);
  CHECK(hits[1].point.z() == 20.0);
}

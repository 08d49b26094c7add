#include "doctest.h"

#include "oracles.hpp"
#include "vacufix/point_index.hpp"

#include <random>

using namespace vacufix;

TEST_CASE("radius query over four corners is inclusive") {
  const std::vector<Vec3> pts{{0, 0, 5}, {10, 0, -2}, {0, 10, 1}, {10, 10, 0}};
  const auto index = build_point_index(pts);
  CHECK(radius_query(index, Vec2(0, 0), 10.0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(radius_query(index, Vec2(5, 5), std::sqrt(50.0) + 1e-12).size() == 4);
  CHECK(radius_query(index, Vec2(5, 5), 7.0).empty());
  CHECK(radius_query(index, Vec2(100, 100), 1.0).empty());
}

TEST_CASE("knn on a collinear set breaks ties by index") {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}};
  const auto index = build_point_index(pts);
  CHECK(knn_query(index, Vec2(0.5, 0), 2) == std::vector<std::size_t>{0, 1});
  CHECK(knn_query(index, Vec2(2, 0), 2) == std::vector<std::size_t>{1, 2});
  CHECK(knn_query(index, Vec2(3, 0), 10) == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("invalid queries and empty sets are rejected") {
  CHECK_THROWS_AS(build_point_index(std::vector<Vec3>{}), Error);
  const std::vector<Vec3> pts{{0, 0, 0}};
  const auto index = build_point_index(pts);
  CHECK_THROWS_AS(radius_query(index, Vec2(0, 0), 0.0), Error);
  CHECK_THROWS_AS(radius_query(index, Vec2(0, 0), -1.0), Error);
  CHECK_THROWS_AS(knn_query(index, Vec2(0, 0), 0), Error);
}

TEST_CASE("1000 random points agree with a linear scan") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<Vec3> pts;
  std::vector<Vec2> flat;
  for (int i = 0; i < 1000; ++i) {
    pts.emplace_back(u(rng), u(rng), u(rng));
    flat.push_back(planar(pts.back()));
  }
  const auto index = build_point_index(pts);
  for (int q = 0; q < 200; ++q) {
    const Vec2 c(u(rng), u(rng));
    const double r = 1.0 + std::abs(u(rng)) / 5.0;
    CHECK(radius_query(index, c, r) == oracle::linear_radius(flat, c, r));
    const std::size_t k = 1 + static_cast<std::size_t>(std::abs(u(rng)));
    CHECK(knn_query(index, c, k) == oracle::linear_knn(flat, c, k));
  }
}

TEST_CASE("property: random sets including duplicates and lattices match the oracle") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(u(rng) * 300);
    std::vector<Vec3> pts;
    std::vector<Vec2> flat;
    const bool lattice = trial % 3 == 0;
    for (int i = 0; i < n; ++i) {
      Vec3 p = lattice ? Vec3(std::floor(u(rng) * 10) * 2.0, std::floor(u(rng) * 10) * 2.0, u(rng))
                       : Vec3(u(rng) * 40, u(rng) * 40, u(rng));
      pts.push_back(p);
      flat.push_back(planar(p));
    }
    const auto index = build_point_index(pts);
    for (int q = 0; q < 20; ++q) {
      const Vec2 c = lattice ? Vec2(std::floor(u(rng) * 10) * 2.0, std::floor(u(rng) * 10) * 2.0)
                             : Vec2(u(rng) * 40, u(rng) * 40);
      const double r = lattice ? 2.0 * (1 + q % 3) : 0.5 + u(rng) * 10;
      REQUIRE(radius_query(index, c, r) == oracle::linear_radius(flat, c, r));
      const std::size_t k = 1 + q * 3;
      REQUIRE(knn_query(index, c, k) == oracle::linear_knn(flat, c, k));
    }
  }
}

TEST_CASE("3D tree matches a brute-force scan") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) {
    pts.emplace_back(u(rng), u(rng), u(rng));
  }
  const KdTree<3> tree(pts);
  for (int q = 0; q < 50; ++q) {
    const Vec3 c(u(rng), u(rng), u(rng));
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      all.emplace_back((pts[i] - c).squaredNorm(), i);
    }
    std::sort(all.begin(), all.end());
    const auto got = tree.knn_query(c, 12);
    REQUIRE(got.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
      CHECK(got[i] == all[i].second);
    }
  }
}

#include "vacufix/point_index.hpp"

namespace vacufix {

PlanarPointIndex build_point_index(std::span<const Vec3> points) {
  std::vector<Vec2> planar_points;
  planar_points.reserve(points.size());
  for (const auto& p : points) {
    planar_points.push_back(planar(p));
  }
  return PlanarPointIndex(std::move(planar_points));
}

} // namespace vacufix

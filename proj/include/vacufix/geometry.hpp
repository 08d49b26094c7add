#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>

namespace vacufix {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Box3 = Eigen::AlignedBox3d;
using Triangle = std::array<std::uint32_t, 3>;

// Millimetre geometry, SI for everything else.
inline constexpr double kMmToM = 1e-3;
inline constexpr double kStandardGravity = 9.81;

inline Vec2 planar(const Vec3& p) {
  return {p.x(), p.y()};
}

inline double deg_to_rad(double deg) {
  return deg * (EIGEN_PI / 180.0);
}

inline double rad_to_deg(double rad) {
  return rad * (180.0 / EIGEN_PI);
}

// z-component of the 2D cross product (b - a) x (c - a).
inline double cross2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

} // namespace vacufix

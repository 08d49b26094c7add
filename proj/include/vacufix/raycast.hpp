#pragma once

#include "vacufix/geometry.hpp"
#include "vacufix/mesh.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace vacufix {

struct Ray {
  Vec3 origin;
  Vec3 direction; // unit length

  Ray(const Vec3& origin_in, const Vec3& direction_in);

  Vec3 at(double t) const {
    return origin + t * direction;
  }
};

struct HitRecord {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
  std::size_t triangle_id = 0;
  Vec3 facet_normal = Vec3::UnitZ();
};

// Hits closer than this along a ray are reported once.
inline constexpr double kHitMergeDistance = 1e-6;
inline constexpr double kDefaultSelfSkip = 1e-3;

// Watertight ray/triangle test (shear-and-scale to ray space, edge functions
// evaluated without a barycentric epsilon). Points on a shared edge are
// reported by every triangle touching it; callers merge by distance.
// Returns the ray parameter t >= 0 on hit.
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1, const Vec3& v2);

// All intersections with t >= 0, ascending, merged within kHitMergeDistance.
std::vector<HitRecord> raycast_all_hits(const TriMesh& mesh, const Ray& ray);

// Nearest intersection with t >= t_min.
std::optional<HitRecord> raycast_first_hit(const TriMesh& mesh, const Ray& ray, double t_min = 0.0);

// True iff something is hit strictly beyond `skip` along the direction.
bool raycast_occluded(const TriMesh& mesh,
                      const Vec3& origin,
                      const Vec3& direction,
                      double skip = kDefaultSelfSkip);

} // namespace vacufix

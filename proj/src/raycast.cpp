#include "vacufix/raycast.hpp"

#include "vacufix/bvh.hpp"
#include "vacufix/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vacufix {

Ray::Ray(const Vec3& origin_in, const Vec3& direction_in) : origin(origin_in), direction(direction_in) {
  const double norm = direction.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidArgument, "ray direction must be a finite non-zero vector");
  }
  if (std::abs(norm - 1.0) > 1e-9) {
    direction /= norm;
  }
}

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1, const Vec3& v2) {
  const Vec3& d = ray.direction;
  int kz = 0;
  d.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (d[kz] < 0.0) {
    std::swap(kx, ky);
  }
  const double sx = d[kx] / d[kz];
  const double sy = d[ky] / d[kz];
  const double sz = 1.0 / d[kz];

  const Vec3 a = v0 - ray.origin;
  const Vec3 b = v1 - ray.origin;
  const Vec3 c = v2 - ray.origin;

  const double ax = a[kx] - sx * a[kz];
  const double ay = a[ky] - sy * a[kz];
  const double bx = b[kx] - sx * b[kz];
  const double by = b[ky] - sy * b[kz];
  const double cx = c[kx] - sx * c[kz];
  const double cy = c[ky] - sy * c[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;

  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) {
    return std::nullopt;
  }
  const double det = u + v + w;
  if (det == 0.0) {
    // Ray runs inside the triangle's plane.
    return std::nullopt;
  }
  const double t_scaled = u * sz * a[kz] + v * sz * b[kz] + w * sz * c[kz];
  const double t = t_scaled / det;
  if (!(t >= 0.0)) {
    return std::nullopt;
  }
  return t;
}

namespace {

HitRecord make_hit(const TriMesh& mesh, const Ray& ray, std::size_t tri, double t) {
  HitRecord hit;
  hit.t = t;
  hit.point = ray.at(t);
  hit.triangle_id = tri;
  hit.facet_normal = mesh.facet_normal(tri);
  return hit;
}

template <typename Visitor>
void for_each_candidate(const TriMesh& mesh, const Ray& ray, double t_min, double t_max, Visitor&& visit) {
  const auto& vs = mesh.vertices();
  const auto& tris = mesh.triangles();
  mesh.bvh().traverse(ray, t_min, t_max, [&](std::uint32_t id) {
    const auto& tri = tris[id];
    if (auto t = intersect_triangle(ray, vs[tri[0]], vs[tri[1]], vs[tri[2]])) {
      return visit(id, *t);
    }
    return true;
  });
}

} // namespace

std::vector<HitRecord> raycast_all_hits(const TriMesh& mesh, const Ray& ray) {
  std::vector<std::pair<double, std::size_t>> raw;
  for_each_candidate(mesh, ray, 0.0, std::numeric_limits<double>::infinity(), [&](std::uint32_t id, double t) {
    raw.emplace_back(t, id);
    return true;
  });
  std::sort(raw.begin(), raw.end());
  std::vector<HitRecord> hits;
  for (const auto& [t, id] : raw) {
    if (!hits.empty() && t - hits.back().t <= kHitMergeDistance) {
      continue;
    }
    hits.push_back(make_hit(mesh, ray, id, t));
  }
  return hits;
}

std::optional<HitRecord> raycast_first_hit(const TriMesh& mesh, const Ray& ray, double t_min) {
  double best_t = std::numeric_limits<double>::infinity();
  std::size_t best_id = 0;
  for_each_candidate(mesh, ray, t_min, best_t, [&](std::uint32_t id, double t) {
    if (t >= t_min && (t < best_t || (t == best_t && id < best_id))) {
      best_t = t;
      best_id = id;
    }
    return true;
  });
  if (!std::isfinite(best_t)) {
    return std::nullopt;
  }
  return make_hit(mesh, ray, best_id, best_t);
}

bool raycast_occluded(const TriMesh& mesh, const Vec3& origin, const Vec3& direction, double skip) {
  if (skip < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "occlusion skip distance must be non-negative");
  }
  const Ray ray(origin, direction);
  bool occluded = false;
  for_each_candidate(mesh, ray, skip, std::numeric_limits<double>::infinity(), [&](std::uint32_t, double t) {
    if (t > skip) {
      occluded = true;
      return false;
    }
    return true;
  });
  return occluded;
}

} // namespace vacufix

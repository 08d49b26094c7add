#pragma once

#include "vacufix/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <vector>

namespace vacufix {

class Bvh;

/// Indexed triangle surface in millimetres.
///
/// Construction drops triangles whose area is at or below the degeneracy
/// threshold (the count is kept in dropped_degenerate()) and records whether
/// the surface is closed and consistently oriented. A TriMesh is immutable;
/// the ray acceleration structure is built on first use and shared by copies.
class TriMesh {
 public:
  static constexpr double kDefaultAreaEpsilon = 1e-9;

  TriMesh(std::vector<Vec3> vertices,
          std::vector<Triangle> triangles,
          double area_epsilon = kDefaultAreaEpsilon);

  const std::vector<Vec3>& vertices() const noexcept {
    return vertices_;
  }
  const std::vector<Triangle>& triangles() const noexcept {
    return triangles_;
  }
  const Box3& bbox() const noexcept {
    return bbox_;
  }
  bool watertight() const noexcept {
    return watertight_;
  }
  std::size_t dropped_degenerate() const noexcept {
    return dropped_degenerate_;
  }
  double diagonal() const {
    return bbox_.diagonal().norm();
  }

  // Unit normal following the triangle winding.
  Vec3 facet_normal(std::size_t tri) const;
  double triangle_area(std::size_t tri) const;

  TriMesh translated(const Vec3& offset) const;
  TriMesh transformed(const Eigen::Isometry3d& pose) const;

  // Thread-safe; built once.
  const Bvh& bvh() const;

 private:
  struct LazyBvh;

  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  Box3 bbox_;
  bool watertight_ = false;
  std::size_t dropped_degenerate_ = 0;
  std::shared_ptr<LazyBvh> bvh_;
};

struct MassProperties {
  double volume = 0.0; // mm^3
  Vec3 com = Vec3::Zero(); // mm
  double mass = 0.0; // kg
};

// Divergence-theorem integration over signed tetrahedra. Throws NotWatertight
// for open or inconsistently wound surfaces.
MassProperties mass_properties(const TriMesh& mesh, double density_kg_per_mm3);

struct LoadOptions {
  double area_epsilon = TriMesh::kDefaultAreaEpsilon;
};

// ASCII or binary STL; coordinates are taken as millimetres. Identical
// corner coordinates are welded into shared vertices.
TriMesh load_stl(const std::filesystem::path& path, const LoadOptions& options = {});

void save_stl_binary(const TriMesh& mesh, const std::filesystem::path& path);
void save_stl_ascii(const TriMesh& mesh, const std::filesystem::path& path);

} // namespace vacufix

#pragma once

#include "vacufix/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vacufix {

struct Ray;

// Binary AABB tree over triangles, median split on the widest centroid axis.
class Bvh {
 public:
  struct Node {
    Box3 box;
    std::uint32_t left = 0; // child index, or first primitive for leaves
    std::uint32_t count = 0; // primitives in leaf; 0 for interior nodes
    std::uint32_t right = 0;
  };

  static constexpr std::uint32_t kLeafSize = 4;

  Bvh(std::span<const Vec3> vertices, std::span<const Triangle> triangles);

  const std::vector<Node>& nodes() const noexcept {
    return nodes_;
  }
  const std::vector<std::uint32_t>& primitives() const noexcept {
    return primitives_;
  }

  // Calls visit(triangle_id) for every triangle whose box the ray touches
  // within [t_min, t_max]. The visitor returns false to stop early.
  template <typename Visitor>
  void traverse(const Ray& ray, double t_min, double t_max, Visitor&& visit) const;

 private:
  std::uint32_t build(std::vector<Vec3>& centroids,
                      std::span<const Vec3> vertices,
                      std::span<const Triangle> triangles,
                      std::uint32_t begin,
                      std::uint32_t end);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> primitives_;
};

bool ray_box_overlap(const Box3& box, const Vec3& origin, const Vec3& inv_dir, const Vec3& dir, double t_min, double t_max);

} // namespace vacufix

#include "vacufix/raycast.hpp"

namespace vacufix {

template <typename Visitor>
void Bvh::traverse(const Ray& ray, double t_min, double t_max, Visitor&& visit) const {
  if (nodes_.empty()) {
    return;
  }
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!ray_box_overlap(node.box, ray.origin, inv_dir, ray.direction, t_min, t_max)) {
      continue;
    }
    if (node.count > 0) {
      for (std::uint32_t i = node.left; i < node.left + node.count; ++i) {
        if (!visit(primitives_[i])) {
          return;
        }
      }
      continue;
    }
    stack[top++] = node.right;
    stack[top++] = node.left;
  }
}

} // namespace vacufix

#include "vacufix/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace vacufix {

namespace {

// Boxes are padded so slab arithmetic rounding cannot reject a hit that the
// exact triangle test accepts on a box face.
constexpr double kBoxPadRelative = 1e-9;

} // namespace

Bvh::Bvh(std::span<const Vec3> vertices, std::span<const Triangle> triangles) {
  if (triangles.empty()) {
    return;
  }
  primitives_.resize(triangles.size());
  std::iota(primitives_.begin(), primitives_.end(), 0u);
  std::vector<Vec3> centroids(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = triangles[i];
    centroids[i] = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }
  nodes_.reserve(2 * triangles.size() / kLeafSize + 1);
  build(centroids, vertices, triangles, 0, static_cast<std::uint32_t>(triangles.size()));
}

std::uint32_t Bvh::build(std::vector<Vec3>& centroids,
                         std::span<const Vec3> vertices,
                         std::span<const Triangle> triangles,
                         std::uint32_t begin,
                         std::uint32_t end) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Box3 box;
  box.setEmpty();
  Box3 centroid_box;
  centroid_box.setEmpty();
  for (std::uint32_t i = begin; i < end; ++i) {
    const auto prim = primitives_[i];
    for (const auto v : triangles[prim]) {
      box.extend(vertices[v]);
    }
    centroid_box.extend(centroids[prim]);
  }
  const double pad = kBoxPadRelative * std::max(1.0, box.diagonal().norm());
  box.min().array() -= pad;
  box.max().array() += pad;
  nodes_[index].box = box;

  if (end - begin <= kLeafSize) {
    nodes_[index].left = begin;
    nodes_[index].count = end - begin;
    return index;
  }

  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(primitives_.begin() + begin,
                   primitives_.begin() + mid,
                   primitives_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centroids[a][axis] != centroids[b][axis]) {
                       return centroids[a][axis] < centroids[b][axis];
                     }
                     return a < b;
                   });

  const std::uint32_t left = build(centroids, vertices, triangles, begin, mid);
  const std::uint32_t right = build(centroids, vertices, triangles, mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

bool ray_box_overlap(const Box3& box,
                     const Vec3& origin,
                     const Vec3& inv_dir,
                     const Vec3& dir,
                     double t_min,
                     double t_max) {
  for (int axis = 0; axis < 3; ++axis) {
    if (dir[axis] == 0.0) {
      if (origin[axis] < box.min()[axis] || origin[axis] > box.max()[axis]) {
        return false;
      }
      continue;
    }
    double t0 = (box.min()[axis] - origin[axis]) * inv_dir[axis];
    double t1 = (box.max()[axis] - origin[axis]) * inv_dir[axis];
    if (t0 > t1) {
      std::swap(t0, t1);
    }
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) {
      return false;
    }
  }
  return true;
}

} // namespace vacufix

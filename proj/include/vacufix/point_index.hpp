#pragma once

#include "vacufix/error.hpp"
#include "vacufix/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace vacufix {

/// Balanced k-d tree over a fixed point set.
///
/// Radius queries are inclusive (distance <= radius) and return indices in
/// ascending order. k-nearest queries order results by (distance, index) so
/// equidistant points resolve to the lower index; k is clamped to the point
/// count.
template <int Dim>
class KdTree {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) {
      throw Error(ErrorCode::EmptyPointSet, "cannot index an empty point set");
    }
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }

  std::size_t size() const noexcept {
    return points_.size();
  }
  const Point& point(std::size_t i) const {
    return points_[i];
  }

  std::vector<std::size_t> radius_query(const Point& center, double radius) const {
    std::vector<std::size_t> out;
    const double r2 = radius * radius;
    radius_recurse(0, center, r2, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::size_t> knn_query(const Point& center, std::size_t k) const {
    k = std::min(k, points_.size());
    std::vector<std::pair<double, std::size_t>> best;
    best.reserve(k + 1);
    if (k > 0) {
      knn_recurse(0, center, k, best);
    }
    std::vector<std::size_t> out;
    out.reserve(best.size());
    for (const auto& [d2, idx] : best) {
      out.push_back(idx);
    }
    return out;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 8;

  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    int axis = -1; // -1 marks a leaf
    double split = 0.0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) {
      return index;
    }
    Point lo = points_[order_[begin]];
    Point hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       if (points_[a][axis] != points_[b][axis]) {
                         return points_[a][axis] < points_[b][axis];
                       }
                       return a < b;
                     });
    const double split = points_[order_[mid]][axis];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[index].axis = axis;
    nodes_[index].split = split;
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

  // Left subtree holds coordinates <= split, right subtree >= split.
  void radius_recurse(std::uint32_t ni, const Point& c, double r2, std::vector<std::size_t>& out) const {
    const Node& node = nodes_[ni];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if ((points_[order_[i]] - c).squaredNorm() <= r2) {
          out.push_back(order_[i]);
        }
      }
      return;
    }
    const double diff = c[node.axis] - node.split;
    if (diff <= 0.0 || diff * diff <= r2) {
      radius_recurse(node.left, c, r2, out);
    }
    if (diff >= 0.0 || diff * diff <= r2) {
      radius_recurse(node.right, c, r2, out);
    }
  }

  void knn_recurse(std::uint32_t ni,
                   const Point& c,
                   std::size_t k,
                   std::vector<std::pair<double, std::size_t>>& best) const {
    const Node& node = nodes_[ni];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::pair<double, std::size_t> cand{(points_[order_[i]] - c).squaredNorm(), order_[i]};
        if (best.size() == k && !(cand < best.back())) {
          continue;
        }
        best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        if (best.size() > k) {
          best.pop_back();
        }
      }
      return;
    }
    const double diff = c[node.axis] - node.split;
    const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
    knn_recurse(near, c, k, best);
    if (best.size() < k || diff * diff <= best.back().first) {
      knn_recurse(far, c, k, best);
    }
  }

  std::vector<Point> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Planar (x, y) index over 3D points; z is ignored by every query.
using PlanarPointIndex = KdTree<2>;

PlanarPointIndex build_point_index(std::span<const Vec3> points);

inline std::vector<std::size_t> radius_query(const PlanarPointIndex& index, const Vec2& center, double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  }
  return index.radius_query(center, radius);
}

inline std::vector<std::size_t> knn_query(const PlanarPointIndex& index, const Vec2& center, std::size_t k) {
  if (k < 1) {
    throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  }
  return index.knn_query(center, k);
}

} // namespace vacufix

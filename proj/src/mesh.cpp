#include "vacufix/mesh.hpp"

#include "vacufix/bvh.hpp"
#include "vacufix/error.hpp"

#include <mutex>
#include <unordered_map>

namespace vacufix {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadableFile:
      return "UnreadableFile";
    case ErrorCode::TruncatedBinary:
      return "TruncatedBinary";
    case ErrorCode::EmptyMesh:
      return "EmptyMesh";
    case ErrorCode::NotWatertight:
      return "NotWatertight";
    case ErrorCode::EmptyPointSet:
      return "EmptyPointSet";
    case ErrorCode::EmptyResult:
      return "EmptyResult";
    case ErrorCode::TooFewPoints:
      return "TooFewPoints";
    case ErrorCode::TooFewCandidates:
      return "TooFewCandidates";
    case ErrorCode::DegenerateGeometry:
      return "DegenerateGeometry";
    case ErrorCode::UnknownId:
      return "UnknownId";
    case ErrorCode::InvalidConfig:
      return "InvalidConfig";
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

struct TriMesh::LazyBvh {
  std::once_flag once;
  std::unique_ptr<Bvh> tree;
};

namespace {

double area_of(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

// Closed and consistently wound: each directed edge occurs once and its
// reverse occurs once.
bool is_closed_oriented(const std::vector<Triangle>& triangles) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(triangles.size() * 3);
  auto key = [](std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = tri[e];
      const std::uint32_t b = tri[(e + 1) % 3];
      if (++directed[key(a, b)] > 1) {
        return false;
      }
    }
  }
  for (const auto& [k, count] : directed) {
    const auto a = static_cast<std::uint32_t>(k >> 32);
    const auto b = static_cast<std::uint32_t>(k & 0xffffffffu);
    if (directed.find(key(b, a)) == directed.end()) {
      return false;
    }
  }
  return true;
}

} // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles, double area_epsilon)
    : vertices_(std::move(vertices)), bvh_(std::make_shared<LazyBvh>()) {
  const auto n_vertices = vertices_.size();
  triangles_.reserve(triangles.size());
  for (const auto& tri : triangles) {
    for (const auto idx : tri) {
      if (idx >= n_vertices) {
        throw Error(ErrorCode::InvalidArgument,
                    "triangle index " + std::to_string(idx) + " out of range (" +
                        std::to_string(n_vertices) + " vertices)");
      }
    }
    if (area_of(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) <= area_epsilon) {
      ++dropped_degenerate_;
      continue;
    }
    triangles_.push_back(tri);
  }
  if (triangles_.empty()) {
    throw Error(ErrorCode::EmptyMesh, "mesh has no valid triangles");
  }
  bbox_.setEmpty();
  for (const auto& v : vertices_) {
    bbox_.extend(v);
  }
  watertight_ = is_closed_oriented(triangles_);
}

Vec3 TriMesh::facet_normal(std::size_t tri) const {
  const auto& t = triangles_[tri];
  return (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).normalized();
}

double TriMesh::triangle_area(std::size_t tri) const {
  const auto& t = triangles_[tri];
  return area_of(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

TriMesh TriMesh::translated(const Vec3& offset) const {
  std::vector<Vec3> moved = vertices_;
  for (auto& v : moved) {
    v += offset;
  }
  return TriMesh(std::move(moved), triangles_);
}

TriMesh TriMesh::transformed(const Eigen::Isometry3d& pose) const {
  std::vector<Vec3> moved = vertices_;
  for (auto& v : moved) {
    v = pose * v;
  }
  return TriMesh(std::move(moved), triangles_);
}

const Bvh& TriMesh::bvh() const {
  std::call_once(bvh_->once, [this] { bvh_->tree = std::make_unique<Bvh>(vertices_, triangles_); });
  return *bvh_->tree;
}

MassProperties mass_properties(const TriMesh& mesh, double density_kg_per_mm3) {
  if (!mesh.watertight()) {
    throw Error(ErrorCode::NotWatertight, "mesh has open or inconsistently oriented edges");
  }
  // Integrate relative to the bbox corner so results stay accurate far from
  // the origin.
  const Vec3 ref = mesh.bbox().min();
  const auto& vs = mesh.vertices();
  double six_volume = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (const auto& tri : mesh.triangles()) {
    const Vec3 a = vs[tri[0]] - ref;
    const Vec3 b = vs[tri[1]] - ref;
    const Vec3 c = vs[tri[2]] - ref;
    const double det = a.dot(b.cross(c));
    six_volume += det;
    weighted += det * (a + b + c);
  }
  if (!(six_volume > 0.0)) {
    throw Error(ErrorCode::NotWatertight, "non-positive enclosed volume (inverted winding?)");
  }
  MassProperties props;
  props.volume = six_volume / 6.0;
  props.com = ref + weighted / (4.0 * six_volume);
  props.mass = density_kg_per_mm3 * props.volume;
  return props;
}

} // namespace vacufix

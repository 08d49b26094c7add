#include "vacufix/shapes.hpp"

#include "vacufix/error.hpp"

#include <cmath>
#include <numeric>

namespace vacufix::shapes {

namespace {

// Ear clipping; fine for the handful of vertices our profiles carry.
std::vector<Triangle> triangulate_ccw(const std::vector<Vec2>& poly) {
  std::vector<std::uint32_t> remaining(poly.size());
  std::iota(remaining.begin(), remaining.end(), 0u);
  std::vector<Triangle> out;
  auto inside = [&](const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross2(a, b, p) >= 0.0 && cross2(b, c, p) >= 0.0 && cross2(c, a, p) >= 0.0;
  };
  while (remaining.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const auto ia = remaining[(i + remaining.size() - 1) % remaining.size()];
      const auto ib = remaining[i];
      const auto ic = remaining[(i + 1) % remaining.size()];
      if (cross2(poly[ia], poly[ib], poly[ic]) <= 0.0) {
        continue;
      }
      bool ear = true;
      for (const auto j : remaining) {
        if (j != ia && j != ib && j != ic && inside(poly[j], poly[ia], poly[ib], poly[ic])) {
          ear = false;
          break;
        }
      }
      if (!ear) {
        continue;
      }
      out.push_back({ia, ib, ic});
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) {
      throw Error(ErrorCode::InvalidArgument, "profile is not a simple counter-clockwise polygon");
    }
  }
  out.push_back({remaining[0], remaining[1], remaining[2]});
  return out;
}

} // namespace

TriMesh box(const Vec3& lo, const Vec3& hi) {
  const std::vector<Vec2> profile{{lo.x(), lo.z()}, {hi.x(), lo.z()}, {hi.x(), hi.z()}, {lo.x(), hi.z()}};
  return extrude_xz(profile, lo.y(), hi.y());
}

TriMesh extrude_xz(const std::vector<Vec2>& profile, double y0, double y1) {
  const auto n = static_cast<std::uint32_t>(profile.size());
  std::vector<Vec3> vertices;
  vertices.reserve(2 * n);
  for (const auto& p : profile) {
    vertices.emplace_back(p.x(), y0, p.y());
  }
  for (const auto& p : profile) {
    vertices.emplace_back(p.x(), y1, p.y());
  }
  std::vector<Triangle> triangles;
  // CCW in (x, z) has its normal along x cross z = -y: the y0 cap keeps the
  // winding, the y1 cap reverses it.
  for (const auto& t : triangulate_ccw(profile)) {
    triangles.push_back(t);
    triangles.push_back({t[0] + n, t[2] + n, t[1] + n});
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t a = i;
    const std::uint32_t b = (i + 1) % n;
    triangles.push_back({a, b + n, b});
    triangles.push_back({a, a + n, b + n});
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

TriMesh uv_sphere(const Vec3& center, double radius, int rings, int segments) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  vertices.push_back(center - radius * Vec3::UnitZ()); // south pole
  for (int r = 1; r < rings; ++r) {
    const double polar = EIGEN_PI * r / rings; // from the south pole
    for (int s = 0; s < segments; ++s) {
      const double az = 2.0 * EIGEN_PI * s / segments;
      vertices.push_back(center + radius * Vec3(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                                                -std::cos(polar)));
    }
  }
  vertices.push_back(center + radius * Vec3::UnitZ());
  const auto north = static_cast<std::uint32_t>(vertices.size() - 1);
  auto ring_vertex = [&](int r, int s) {
    return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
  };
  for (int s = 0; s < segments; ++s) {
    triangles.push_back({0, ring_vertex(1, s + 1), ring_vertex(1, s)});
  }
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const auto a = ring_vertex(r, s);
      const auto b = ring_vertex(r, s + 1);
      const auto c = ring_vertex(r + 1, s + 1);
      const auto d = ring_vertex(r + 1, s);
      triangles.push_back({a, b, c});
      triangles.push_back({a, c, d});
    }
  }
  for (int s = 0; s < segments; ++s) {
    triangles.push_back({north, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1)});
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

TriMesh flipped(const TriMesh& mesh) {
  std::vector<Triangle> tris = mesh.triangles();
  for (auto& t : tris) {
    std::swap(t[1], t[2]);
  }
  return TriMesh(mesh.vertices(), std::move(tris));
}

TriMesh merged(const std::vector<TriMesh>& parts) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  for (const auto& part : parts) {
    const auto offset = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), part.vertices().begin(), part.vertices().end());
    for (const auto& t : part.triangles()) {
      triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    }
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

TriMesh stepped_plate(double length, double width, double thickness, double step_x, double step_height) {
  return extrude_xz({{0.0, 0.0},
                     {step_x, 0.0},
                     {step_x, step_height},
                     {length, step_height},
                     {length, thickness},
                     {0.0, thickness}},
                    0.0, width);
}

TriMesh grooved_plate(double length, double width, double thickness, double x0, double x1, double depth) {
  return extrude_xz({{0.0, 0.0},
                     {x0, 0.0},
                     {x0, depth},
                     {x1, depth},
                     {x1, 0.0},
                     {length, 0.0},
                     {length, thickness},
                     {0.0, thickness}},
                    0.0, width);
}

TriMesh hollow_box(const Vec3& lo, const Vec3& hi, double wall) {
  const Vec3 pad = Vec3::Constant(wall);
  return merged({box(lo, hi), flipped(box(lo + pad, hi - pad))});
}

TriMesh appliance_housing() {
  // 240 x 160 x 70 mm body; 4 mm deep underside groove across x in [104, 136];
  // cavity x in [12, 228], y in [12, 148], z in [16, 60]; shelf block inside.
  const TriMesh outer = grooved_plate(240.0, 160.0, 70.0, 104.0, 136.0, 4.0);
  const TriMesh cavity = flipped(box(Vec3(12.0, 12.0, 16.0), Vec3(228.0, 148.0, 60.0)));
  const TriMesh shelf = box(Vec3(30.0, 30.0, 30.0), Vec3(90.0, 130.0, 36.0));
  return merged({outer, cavity, shelf});
}

} // namespace vacufix::shapes

#include "vacufix/candidate_filter.hpp"

#include "vacufix/error.hpp"
#include "vacufix/parallel.hpp"
#include "vacufix/point_index.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace vacufix {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::P0:
      return "P0";
    case Stage::P1:
      return "P1";
    case Stage::P2:
      return "P2";
    case Stage::Psupport:
      return "Psupport";
    case Stage::P3:
      return "P3";
    case Stage::P4:
      return "P4";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (const auto stage : kAllStages) {
    if (to_string(stage) == name) {
      return stage;
    }
  }
  return std::nullopt;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None:
      return "";
    case RejectReason::Inclination:
      return "inclination";
    case RejectReason::Occluded:
      return "occluded";
    case RejectReason::AboveCom:
      return "above_com";
    case RejectReason::IncompleteContact:
      return "incomplete_contact";
    case RejectReason::Discontinuous:
      return "discontinuous";
  }
  return "?";
}

void FilterParams::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, field + " " + why);
  };
  auto positive = [&](double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      fail(field, "must be a positive finite length, got " + std::to_string(value));
    }
  };
  positive(grid_pitch, "grid_pitch");
  positive(suction_radius, "suction_radius");
  positive(continuity_delta, "continuity_delta");
  positive(ring_window, "ring_window");
  if (knn_k < 1) {
    fail("knn_k", "must be >= 1");
  }
  if (ring_rays < 1) {
    fail("ring_rays", "must be >= 1");
  }
  if (!(theta_max > 0.0 && theta_max < 90.0)) {
    fail("theta_max", "must lie in (0, 90) degrees, got " + std::to_string(theta_max));
  }
  if (!(coverage_tau > 0.0 && coverage_tau <= 1.0)) {
    fail("coverage_tau", "must lie in (0, 1], got " + std::to_string(coverage_tau));
  }
  if (!(visibility_skip >= 0.0)) {
    fail("visibility_skip", "must be >= 0");
  }
}

namespace {

// Inclination boundary is inclusive; this absorbs acos/atan2 rounding at
// exactly theta_max.
constexpr double kAngleTolerance = 1e-12;

template <typename Keep>
StageSet apply_filter(const StageSet& input, Stage stage, RejectReason reason, Keep&& keep) {
  std::vector<char> verdict(input.points.size(), 0);
  parallel_for(input.points.size(), [&](std::size_t i) { verdict[i] = keep(input.points[i]) ? 1 : 0; });
  StageSet out;
  out.stage = stage;
  out.points.reserve(input.points.size());
  for (std::size_t i = 0; i < input.points.size(); ++i) {
    if (verdict[i]) {
      out.points.push_back(input.points[i]);
    } else {
      out.rejected.push_back({input.points[i], reason});
    }
  }
  return out;
}

Vec3 orient_up(Vec3 n) {
  n.normalize();
  if (n.z() < 0.0) {
    n = -n;
  } else if (n.z() == 0.0 && (n.x() < 0.0 || (n.x() == 0.0 && n.y() < 0.0))) {
    n = -n;
  }
  return n;
}

} // namespace

StageSet sample_surface(const TriMesh& mesh, const FilterParams& params) {
  params.validate();
  const Box3& box = mesh.bbox();
  const Vec3 extent = box.sizes();
  if (!(extent.x() > 0.0 && extent.y() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "mesh has no XY extent to sample");
  }
  const double pitch = params.grid_pitch;
  const int nx = static_cast<int>(std::floor(extent.x() / pitch)) + 2;
  const int ny = static_cast<int>(std::floor(extent.y() / pitch)) + 2;
  const double launch_z = box.min().z() - 1.0;

  std::vector<std::vector<HitRecord>> per_ray(static_cast<std::size_t>(nx) * ny);
  parallel_for(per_ray.size(), [&](std::size_t idx) {
    const int ix = static_cast<int>(idx / ny);
    const int iy = static_cast<int>(idx % ny);
    const Vec3 origin(box.min().x() + ix * pitch, box.min().y() + iy * pitch, launch_z);
    per_ray[idx] = raycast_all_hits(mesh, Ray(origin, Vec3::UnitZ()));
  });

  StageSet out;
  out.stage = Stage::P0;
  for (std::size_t idx = 0; idx < per_ray.size(); ++idx) {
    const int ix = static_cast<int>(idx / ny);
    const int iy = static_cast<int>(idx % ny);
    for (std::size_t rank = 0; rank < per_ray[idx].size(); ++rank) {
      SamplePoint sp;
      sp.position = per_ray[idx][rank].point;
      sp.ray_cell = {ix, iy};
      sp.hit_rank = static_cast<int>(rank);
      out.points.push_back(sp);
    }
  }
  if (out.points.empty()) {
    throw Error(ErrorCode::EmptyResult, "no sampling ray hit the mesh");
  }
  return out;
}

StageSet estimate_normals(StageSet points, const FilterParams& params) {
  params.validate();
  const std::size_t n = points.points.size();
  if (n < 3) {
    throw Error(ErrorCode::TooFewPoints, "normal estimation needs at least 3 points, got " + std::to_string(n));
  }
  std::vector<Vec3> positions;
  positions.reserve(n);
  for (const auto& p : points.points) {
    positions.push_back(p.position);
  }
  const KdTree<3> tree(positions);
  const auto k = static_cast<std::size_t>(params.knn_k);
  parallel_for(n, [&](std::size_t i) {
    const auto neighbours = tree.knn_query(positions[i], k);
    Eigen::MatrixX3d local(neighbours.size(), 3);
    Vec3 mean = Vec3::Zero();
    for (const auto j : neighbours) {
      mean += positions[j];
    }
    mean /= static_cast<double>(neighbours.size());
    for (std::size_t r = 0; r < neighbours.size(); ++r) {
      local.row(static_cast<Eigen::Index>(r)) = (positions[neighbours[r]] - mean).transpose();
    }
    const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(local, Eigen::ComputeFullV);
    points.points[i].normal = orient_up(svd.matrixV().col(2));
  });
  return points;
}

StageSet filter_inclination(const StageSet& points, const FilterParams& params) {
  const double limit = deg_to_rad(params.theta_max);
  return apply_filter(points, Stage::P1, RejectReason::Inclination, [&](const SamplePoint& p) {
    const double angle = std::atan2(p.normal.head<2>().norm(), p.normal.z());
    return angle <= limit + kAngleTolerance;
  });
}

StageSet filter_visibility(const StageSet& points, const TriMesh& mesh, const FilterParams& params) {
  const Vec3 down(0.0, 0.0, -1.0);
  return apply_filter(points, Stage::P2, RejectReason::Occluded, [&](const SamplePoint& p) {
    return !raycast_occluded(mesh, p.position, down, params.visibility_skip);
  });
}

StageSet filter_below_com(const StageSet& points, const Vec3& com) {
  return apply_filter(points, Stage::Psupport, RejectReason::AboveCom,
                      [&](const SamplePoint& p) { return p.position.z() < com.z(); });
}

namespace {

int ring_hit_count(const TriMesh& mesh, const Vec3& p, const FilterParams& params) {
  const double z_lo = p.z() - params.ring_window;
  const double z_hi = p.z() + params.ring_window;
  int hits = 0;
  for (int k = 0; k < params.ring_rays; ++k) {
    const double phi = 2.0 * EIGEN_PI * k / params.ring_rays;
    const Vec3 origin(p.x() + params.suction_radius * std::cos(phi),
                      p.y() + params.suction_radius * std::sin(phi), z_lo);
    const auto hit = raycast_first_hit(mesh, Ray(origin, Vec3::UnitZ()));
    if (hit && hit->point.z() >= z_lo && hit->point.z() <= z_hi) {
      ++hits;
    }
  }
  return hits;
}

} // namespace

double ring_coverage(const TriMesh& mesh, const Vec3& p, const FilterParams& params) {
  return static_cast<double>(ring_hit_count(mesh, p, params)) / params.ring_rays;
}

StageSet filter_completeness(const StageSet& points, const TriMesh& mesh, const FilterParams& params) {
  params.validate();
  return apply_filter(points, Stage::P3, RejectReason::IncompleteContact, [&](const SamplePoint& p) {
    const int hits = ring_hit_count(mesh, p.position, params);
    return static_cast<double>(hits) / params.ring_rays >= params.coverage_tau - 1e-12;
  });
}

StageSet filter_continuity(const StageSet& points, const StageSet& neighbor_source, const FilterParams& params) {
  params.validate();
  if (neighbor_source.points.empty()) {
    return apply_filter(points, Stage::P4, RejectReason::Discontinuous, [](const SamplePoint&) { return true; });
  }
  std::vector<Vec3> source;
  source.reserve(neighbor_source.points.size());
  for (const auto& q : neighbor_source.points) {
    source.push_back(q.position);
  }
  const PlanarPointIndex index = build_point_index(source);
  return apply_filter(points, Stage::P4, RejectReason::Discontinuous, [&](const SamplePoint& p) {
    for (const auto j : index.radius_query(planar(p.position), params.suction_radius)) {
      if (std::abs(source[j].z() - p.position.z()) > params.continuity_delta) {
        return false;
      }
    }
    return true;
  });
}

const StageSet& PipelineResult::at(Stage stage) const {
  const auto i = static_cast<std::size_t>(stage);
  if (i >= stages.size()) {
    throw Error(ErrorCode::InvalidArgument, "pipeline stopped before stage " + std::string(to_string(stage)));
  }
  return stages[i];
}

PipelineResult run_pipeline(const TriMesh& mesh,
                            const Vec3& com,
                            const FilterParams& params,
                            std::optional<Stage> stop_after) {
  params.validate();
  PipelineResult result;
  result.stages.reserve(kAllStages.size());
  auto push = [&](StageSet set) {
    if (!result.first_empty && set.points.empty()) {
      result.first_empty = set.stage;
    }
    result.stages.push_back(std::move(set));
    return !(stop_after && result.stages.back().stage == *stop_after);
  };

  StageSet p0 = estimate_normals(sample_surface(mesh, params), params);
  if (!push(std::move(p0))) {
    return result;
  }
  if (!push(filter_inclination(result.stages.back(), params))) {
    return result;
  }
  if (!push(filter_visibility(result.stages.back(), mesh, params))) {
    return result;
  }
  if (!push(filter_below_com(result.stages.back(), com))) {
    return result;
  }
  if (!push(filter_completeness(result.stages.back(), mesh, params))) {
    return result;
  }
  const StageSet& neighbours =
      params.neighbor_source == NeighborSource::Psupport ? result.at(Stage::Psupport) : result.at(Stage::P3);
  push(filter_continuity(result.stages.back(), neighbours, params));
  return result;
}

} // namespace vacufix

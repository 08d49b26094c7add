#pragma once

#include "vacufix/geometry.hpp"
#include "vacufix/mesh.hpp"
#include "vacufix/raycast.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace vacufix {

enum class Stage { P0, P1, P2, Psupport, P3, P4 };

inline constexpr std::array<Stage, 6> kAllStages{Stage::P0, Stage::P1, Stage::P2,
                                                 Stage::Psupport, Stage::P3, Stage::P4};

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

enum class RejectReason { None, Inclination, Occluded, AboveCom, IncompleteContact, Discontinuous };

std::string_view to_string(RejectReason reason);

struct SamplePoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ(); // unit, z >= 0
  std::array<int, 2> ray_cell{0, 0};
  int hit_rank = 0;
};

struct Rejection {
  SamplePoint point;
  RejectReason reason = RejectReason::None;
};

// Points surviving a stage plus the ones this stage removed.
struct StageSet {
  Stage stage = Stage::P0;
  std::vector<SamplePoint> points;
  std::vector<Rejection> rejected;
};

enum class NeighborSource { Psupport, P3 };

struct FilterParams {
  double grid_pitch = 2.0; // mm
  int knn_k = 50;
  double theta_max = 60.0; // degrees from +Z
  int ring_rays = 60;
  double suction_radius = 8.7; // mm
  double coverage_tau = 0.9;
  double continuity_delta = 2.5; // mm
  double ring_window = 5.0; // mm, vertical band accepted for ring hits
  double visibility_skip = kDefaultSelfSkip; // mm
  NeighborSource neighbor_source = NeighborSource::Psupport;

  // Throws InvalidConfig naming the offending field.
  void validate() const;
};

// Step 1: vertical +Z rays from an XY lattice anchored at the bbox minimum and
// extended one pitch past the maximum. Every hit becomes a sample.
StageSet sample_surface(const TriMesh& mesh, const FilterParams& params);

// SVD of the centred k-neighbourhood; normal = right singular vector of the
// smallest singular value, flipped so that z >= 0.
StageSet estimate_normals(StageSet points, const FilterParams& params);

StageSet filter_inclination(const StageSet& points, const FilterParams& params);
StageSet filter_visibility(const StageSet& points, const TriMesh& mesh, const FilterParams& params = {});
StageSet filter_below_com(const StageSet& points, const Vec3& com);

// Fraction of ring rays whose first hit lands within ring_window of the
// candidate height.
double ring_coverage(const TriMesh& mesh, const Vec3& p, const FilterParams& params);
StageSet filter_completeness(const StageSet& points, const TriMesh& mesh, const FilterParams& params);

StageSet filter_continuity(const StageSet& points, const StageSet& neighbor_source, const FilterParams& params);

struct PipelineResult {
  std::vector<StageSet> stages; // in kAllStages order; truncated when stopped early
  std::optional<Stage> first_empty;

  const StageSet& at(Stage stage) const;
};

PipelineResult run_pipeline(const TriMesh& mesh,
                            const Vec3& com,
                            const FilterParams& params,
                            std::optional<Stage> stop_after = std::nullopt);

} // namespace vacufix

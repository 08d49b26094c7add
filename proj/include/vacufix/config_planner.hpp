#pragma once

#include "vacufix/candidate_filter.hpp"
#include "vacufix/geometry.hpp"
#include "vacufix/statics.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace vacufix {

/// Square XY cells of side spacing_d / sqrt(2), so any two points in one
/// cell are closer than spacing_d.
struct GridPartition {
  double cell_side = 0.0;
  Vec2 origin = Vec2::Zero();
  std::vector<SamplePoint> points;
  std::map<std::array<int, 2>, std::vector<std::size_t>> cells;
  std::vector<std::size_t> representatives; // one per non-empty cell, cell-key order
};

GridPartition partition_grid(const StageSet& points, double spacing_d);

struct SupportConfig {
  std::string id;
  std::vector<SamplePoint> contacts;
  double footprint_radius = 8.7;
  std::vector<Vec2> hull_vertices;
  bool com_inside = false;
  double margin = 0.0; // mm, positive inside

  double area() const;
  SupportSet support_set() const;
};

struct EnumerateOptions {
  double footprint_radius = 8.7;
  bool enforce_pairwise_spacing = true;
  bool one_per_cell = true; // false: every partitioned point is a candidate
  double collinear_angle_deg = 1.0;
};

std::vector<SupportConfig> enumerate_configs(const GridPartition& partition,
                                             int arity,
                                             double spacing_d,
                                             const EnumerateOptions& options = {});

inline constexpr int kDefaultCircleSamples = 16;
inline constexpr double kHullEpsilon = 1e-6;

// Hull of samples_per_circle points on each contact's footprint circle.
// Sampling starts on the in-plane normal of the baseline through the first
// two contacts, so two samples reproduce the p +/- r*n offset pair.
std::vector<Vec2> footprint_hull(const SupportConfig& config, int samples_per_circle = kDefaultCircleSamples);

struct InclusionResult {
  bool com_inside = false;
  double margin = 0.0;
};

InclusionResult com_inclusion_test(const SupportConfig& config, const Vec3& com);

// Fills hull_vertices, com_inside and margin.
void evaluate_stability(SupportConfig& config, const Vec3& com, int samples_per_circle = kDefaultCircleSamples);

struct ConfigScore {
  bool feasible = false; // COM inside and feasible at every sweep level
  double worst_suction = 0.0; // N
  double margin = 0.0; // mm
  double area = 0.0; // mm^2
};

ConfigScore score_config(const SupportConfig& config, const std::vector<SweepResult>& sweeps);

struct RankedEntry {
  std::size_t config_index = 0;
  ConfigScore score;
};

struct RankedPlan {
  std::vector<RankedEntry> entries; // best first
};

// Feasible first, then ascending worst suction, descending margin, descending
// area; remaining ties go to lexicographic contact coordinates.
RankedPlan rank_configs(const std::vector<SupportConfig>& configs, const std::vector<ConfigScore>& scores);
RankedPlan rank_configs(const std::vector<SupportConfig>& configs,
                        const std::vector<std::vector<SweepResult>>& sweeps);

} // namespace vacufix

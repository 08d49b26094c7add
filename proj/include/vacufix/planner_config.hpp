#pragma once

#include "vacufix/candidate_filter.hpp"
#include "vacufix/config_planner.hpp"
#include "vacufix/statics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vacufix {

struct InlineConfig {
  std::string id;
  std::vector<Vec3> contacts;
  std::vector<Vec3> normals; // empty means +Z for every contact
};

struct PlannerSettings {
  double spacing_d = 60.0; // mm
  int samples_per_circle = kDefaultCircleSamples;
  bool enforce_pairwise_spacing = true;
  bool one_per_cell = true;
  double collinear_angle_deg = 1.0;
  int report_top_k = 10; // configs whose sweeps go to sweeps.csv
};

/// Everything one run needs. Loaded from a JSON document; unknown keys are
/// rejected and errors name the offending field with its dotted path.
struct PlannerConfig {
  std::filesystem::path source; // the config file itself
  std::optional<std::filesystem::path> mesh;
  std::optional<double> density; // kg/m^3
  std::optional<double> mass; // kg
  std::optional<Vec3> com; // mm
  double gravity = kStandardGravity;
  double characteristic_length = 0.0; // mm, <= 0: derived

  FilterParams filter;
  PlannerSettings planner;
  SuctionLimits suction;
  SweepRange sweep;
  std::optional<double> table_press; // N, defaults to the sweep end
  StaticsOptions statics;

  std::vector<ScrewSpec> screws;
  std::vector<InlineConfig> configs;
  std::filesystem::path output_dir = "vacufix_out";

  // Canonical JSON of the effective settings (defaults filled in), used for
  // the provenance hash.
  std::string canonical_json() const;
};

PlannerConfig load_planner_config(const std::filesystem::path& path);
PlannerConfig parse_planner_config(const std::string& text, const std::filesystem::path& base_dir);

} // namespace vacufix

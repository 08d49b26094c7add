#pragma once

#include "vacufix/geometry.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace vacufix {

struct ScrewSpec {
  std::string id;
  Vec3 position = Vec3::Zero(); // mm
  Vec3 axis = -Vec3::UnitZ(); // press direction, unit
  double press_force = 0.0; // N
};

struct SuctionLimits {
  double f_max = 5.7; // N per balloon
};

/// Rigid body the supports must hold. characteristic_length (mm) scales the
/// moment part of the residual; non-positive means "derive from the scene".
struct BodyProperties {
  Vec3 com = Vec3::Zero();
  double mass = 0.0; // kg
  double gravity = kStandardGravity; // m/s^2
  double characteristic_length = 0.0;
};

struct StaticsOptions {
  // Keep only the press force in the load wrench, no moment about the COM.
  bool ignore_press_moment = false;
  // Use +Z for every contact normal instead of the estimated surface normal.
  bool vertical_normals = false;
};

struct SupportSet {
  std::string id;
  std::vector<Vec3> contacts; // mm
  std::vector<Vec3> normals; // unit, n.z > 0
};

struct EquilibriumProblem {
  std::vector<Vec3> contacts;
  std::vector<Vec3> normals;
  BodyProperties body;
  ScrewSpec screw;
  bool ignore_press_moment = false;

  void validate() const;
};

EquilibriumProblem make_problem(const SupportSet& supports,
                                const BodyProperties& body,
                                const ScrewSpec& screw,
                                const StaticsOptions& options = {});

/// A F = -b with A stacking n_j over (r_j x n_j) (moment arms in metres) and
/// b the external load wrench about the COM: gravity plus the screw press.
struct LinearSystem {
  Eigen::Matrix<double, 6, Eigen::Dynamic> A;
  Eigen::Matrix<double, 6, 1> b;
  double load_scale = 0.0; // mg + f_press, N
  double characteristic_length = 1.0; // mm
};

LinearSystem assemble_system(const EquilibriumProblem& problem);

struct EquilibriumResult {
  std::vector<double> forces; // N, negative = suction demand
  double residual = 0.0; // N (moments scaled by 1/characteristic_length)
  double tolerance = 0.0;
  bool feasible = false;
  std::size_t limiting_contact = 0;

  double min_force() const;
  double suction_demand() const; // max(0, -min_force)
};

// Moment rows are weighted in N*mm during the least-squares solve.
inline constexpr double kMomentRowScale = 1000.0;
inline constexpr double kResidualRelativeTolerance = 1e-6;

EquilibriumResult solve_equilibrium(const LinearSystem& system, const SuctionLimits& limits = {});

bool check_suction_feasibility(const EquilibriumResult& result, const SuctionLimits& limits);

struct SweepRange {
  double start = 0.0;
  double end = 18.0;
  double step = 0.5;

  void validate() const;
  std::vector<double> levels() const;
};

struct SweepResult {
  std::vector<double> press_levels;
  std::vector<EquilibriumResult> results;
  std::optional<double> critical_press; // first infeasible level
  std::optional<double> suction_limit_press; // first level where suction exceeds f_max

  bool feasible_throughout() const {
    return !critical_press.has_value();
  }
  double worst_suction_demand() const;
};

SweepResult sweep_press_force(const EquilibriumProblem& problem_template,
                              const SweepRange& range,
                              const SuctionLimits& limits = {});

struct ForceTableCell {
  std::string config_id;
  std::vector<double> forces;
  std::vector<bool> suction; // force < 0
  double residual = 0.0;
  bool feasible = false;
};

struct ForceTableRow {
  std::string screw_id;
  std::optional<ForceTableCell> two_point;
  std::optional<ForceTableCell> three_point;
};

struct ForceTable {
  double press = 0.0;
  std::vector<ForceTableRow> rows;
};

ForceTable screw_force_table(const std::optional<SupportSet>& two_point,
                             const std::optional<SupportSet>& three_point,
                             const std::vector<ScrewSpec>& screws,
                             double press,
                             const BodyProperties& body,
                             const StaticsOptions& options = {},
                             const SuctionLimits& limits = {});

} // namespace vacufix

#pragma once

#include "vacufix/candidate_filter.hpp"
#include "vacufix/config_planner.hpp"
#include "vacufix/planner_config.hpp"
#include "vacufix/statics.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vacufix {

inline constexpr int kExitFeasible = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

const char* tool_version();

// Mass and COM from the config: explicit values win, the mesh fills the rest.
BodyProperties resolve_body(const PlannerConfig& config, const TriMesh* mesh);

struct ConfigEvaluation {
  SupportConfig config;
  int arity = 0;
  std::vector<SweepResult> sweeps; // one per screw, config.screws order
  std::string failure; // set when the statics could not be assembled
  ConfigScore score;
};

struct PlanReport {
  std::vector<std::pair<Stage, std::size_t>> stage_counts;
  std::optional<Stage> first_empty;
  BodyProperties body;
  std::size_t candidates = 0; // grid representatives
  std::vector<ConfigEvaluation> evaluations;
  RankedPlan ranking;
  std::optional<ForceTable> table;
  std::string config_hash;
  std::string mesh_hash;

  bool any_feasible() const;
};

struct PlanRun {
  PlanReport report;
  std::optional<PipelineResult> pipeline;
};

// Filters, enumerates, sweeps and ranks without touching the filesystem
// (beyond reading the mesh).
PlanRun run_plan(const PlannerConfig& config);

nlohmann::json report_json(const PlanReport& report, const PlannerConfig& config,
                           const std::vector<std::string>& artifacts);

// Single solve / sweep for a configuration given inline in the config or
// listed in <output_dir>/configs.json from an earlier plan. UnknownId when
// either id is missing.
EquilibriumResult analyze_equilibrium(const PlannerConfig& config,
                                      const std::string& config_id,
                                      const std::string& screw_id,
                                      std::optional<double> press);
SweepResult analyze_sweep(const PlannerConfig& config, const std::string& config_id, const std::string& screw_id);

int cmd_plan(const PlannerConfig& config, std::ostream& out);
int cmd_filter(const PlannerConfig& config, Stage stage, std::ostream& out);
int cmd_analyze(const PlannerConfig& config,
                const std::string& config_id,
                const std::string& screw_id,
                std::optional<double> press,
                std::ostream& out);
int cmd_sweep(const PlannerConfig& config, const std::string& config_id, const std::string& screw_id,
              std::ostream& out);

} // namespace vacufix

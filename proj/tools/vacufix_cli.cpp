#include "vacufix/commands.hpp"
#include "vacufix/error.hpp"
#include "vacufix/planner_config.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace vacufix;

  CLI::App app{"vacufix: support planning for vacuum fixtures"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string stage_name = "P4";
  std::string config_id;
  std::string screw_id;
  std::optional<double> press;

  auto* plan = app.add_subcommand("plan", "filter, enumerate, sweep and rank support configurations");
  plan->add_option("config", config_path, "planner config (JSON)")->required();

  auto* filter = app.add_subcommand("filter", "run the candidate filters up to one stage and dump it");
  filter->add_option("config", config_path, "planner config (JSON)")->required();
  filter->add_option("--stage", stage_name, "P0, P1, P2, Psupport, P3 or P4");

  auto* analyze = app.add_subcommand("analyze", "solve one equilibrium");
  analyze->add_option("config", config_path, "planner config (JSON)")->required();
  analyze->add_option("--config-id", config_id, "support configuration id")->required();
  analyze->add_option("--screw-id", screw_id, "screw id")->required();
  analyze->add_option("--press", press, "press force in N (defaults to the screw's press)");

  auto* sweep = app.add_subcommand("sweep", "sweep the press force for one configuration and screw");
  sweep->add_option("config", config_path, "planner config (JSON)")->required();
  sweep->add_option("--config-id", config_id, "support configuration id")->required();
  sweep->add_option("--screw-id", screw_id, "screw id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    const PlannerConfig config = load_planner_config(config_path);
    if (plan->parsed()) {
      return cmd_plan(config, std::cout);
    }
    if (filter->parsed()) {
      const auto stage = parse_stage(stage_name);
      if (!stage) {
        throw Error(ErrorCode::InvalidArgument, "--stage must be one of P0, P1, P2, Psupport, P3, P4");
      }
      return cmd_filter(config, *stage, std::cout);
    }
    if (analyze->parsed()) {
      return cmd_analyze(config, config_id, screw_id, press, std::cout);
    }
    return cmd_sweep(config, config_id, screw_id, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

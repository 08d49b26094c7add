#include "vacufix/commands.hpp"

#include "vacufix/artifacts.hpp"
#include "vacufix/error.hpp"
#include "vacufix/mesh.hpp"
#include "vacufix/parallel.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace vacufix {

namespace {

using nlohmann::json;

std::optional<TriMesh> load_mesh(const PlannerConfig& config) {
  if (!config.mesh) {
    return std::nullopt;
  }
  return load_stl(*config.mesh);
}

SupportConfig from_inline(const InlineConfig& c, double radius) {
  SupportConfig config;
  config.id = c.id;
  config.footprint_radius = radius;
  for (std::size_t i = 0; i < c.contacts.size(); ++i) {
    SamplePoint p;
    p.position = c.contacts[i];
    p.normal = c.normals.empty() ? Vec3::UnitZ() : c.normals[i];
    config.contacts.push_back(p);
  }
  return config;
}

ConfigEvaluation evaluate(SupportConfig config, const PlannerConfig& cfg, const BodyProperties& body) {
  ConfigEvaluation ev;
  ev.arity = static_cast<int>(config.contacts.size());
  evaluate_stability(config, body.com, cfg.planner.samples_per_circle);
  try {
    for (const auto& screw : cfg.screws) {
      const auto problem = make_problem(config.support_set(), body, screw, cfg.statics);
      ev.sweeps.push_back(sweep_press_force(problem, cfg.sweep, cfg.suction));
    }
    ev.score = score_config(config, ev.sweeps);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateGeometry && e.code() != ErrorCode::InvalidArgument) {
      throw;
    }
    ev.sweeps.clear();
    ev.failure = e.what();
    ev.score.feasible = false;
    ev.score.worst_suction = std::numeric_limits<double>::infinity();
    ev.score.margin = config.margin;
    ev.score.area = config.area();
  }
  ev.config = std::move(config);
  return ev;
}

json optional_number(const std::optional<double>& v) {
  return v ? json_number(*v) : json(nullptr);
}

json contacts_json(const SupportConfig& c) {
  json out = json::array();
  for (const auto& p : c.contacts) {
    out.push_back({{"position", json_vec(p.position)}, {"normal", json_vec(p.normal)}});
  }
  return out;
}

json screw_summary(const ConfigEvaluation& ev, const PlannerConfig& cfg) {
  json out = json::array();
  for (std::size_t s = 0; s < ev.sweeps.size(); ++s) {
    const auto& sweep = ev.sweeps[s];
    out.push_back({{"screw_id", cfg.screws[s].id},
                   {"feasible", sweep.feasible_throughout()},
                   {"critical_press_N", optional_number(sweep.critical_press)},
                   {"suction_limit_press_N", optional_number(sweep.suction_limit_press)},
                   {"worst_suction_N", json_number(sweep.worst_suction_demand())}});
  }
  return out;
}

json configs_json(const PlanReport& report, const PlannerConfig& cfg) {
  json list = json::array();
  std::size_t rank = 1;
  for (const auto& entry : report.ranking.entries) {
    const auto& ev = report.evaluations[entry.config_index];
    json hull = json::array();
    for (const auto& v : ev.config.hull_vertices) {
      hull.push_back(json_vec(v));
    }
    list.push_back({{"rank", rank++},
                    {"id", ev.config.id},
                    {"arity", ev.arity},
                    {"contacts", contacts_json(ev.config)},
                    {"hull_vertices", hull},
                    {"com_inside", ev.config.com_inside},
                    {"margin_mm", json_number(ev.config.margin)},
                    {"area_mm2", json_number(ev.score.area)},
                    {"feasible", ev.score.feasible},
                    {"worst_suction_N", json_number(ev.score.worst_suction)},
                    {"failure", ev.failure.empty() ? json(nullptr) : json(ev.failure)},
                    {"screws", screw_summary(ev, cfg)}});
  }
  return {{"configs", list}};
}

const std::filesystem::path kConfigsFile = "configs.json";

SupportSet find_support(const PlannerConfig& cfg, const std::string& id) {
  for (const auto& c : cfg.configs) {
    if (c.id == id) {
      return from_inline(c, cfg.filter.suction_radius).support_set();
    }
  }
  const auto path = cfg.output_dir / kConfigsFile;
  if (std::filesystem::is_regular_file(path)) {
    std::ifstream in(path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::UnreadableFile, path.string() + " is not valid JSON: " + e.what());
    }
    for (const auto& entry : doc.at("configs")) {
      if (entry.at("id").get<std::string>() != id) {
        continue;
      }
      SupportSet s;
      s.id = id;
      for (const auto& c : entry.at("contacts")) {
        const auto& p = c.at("position");
        const auto& n = c.at("normal");
        s.contacts.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        s.normals.push_back(Vec3(n[0].get<double>(), n[1].get<double>(), n[2].get<double>()).normalized());
      }
      return s;
    }
  }
  throw Error(ErrorCode::UnknownId,
              "configuration \"" + id + "\" is neither inline in the config nor listed in " + path.string());
}

const ScrewSpec& find_screw(const PlannerConfig& cfg, const std::string& id) {
  for (const auto& s : cfg.screws) {
    if (s.id == id) {
      return s;
    }
  }
  throw Error(ErrorCode::UnknownId, "screw \"" + id + "\" is not defined in the config");
}

std::string safe_name(const std::string& id) {
  std::string out = id;
  for (auto& ch : out) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') {
      ch = '_';
    }
  }
  return out;
}

} // namespace

const char* tool_version() {
  return VACUFIX_VERSION;
}

BodyProperties resolve_body(const PlannerConfig& config, const TriMesh* mesh) {
  BodyProperties body;
  body.gravity = config.gravity;
  body.characteristic_length = config.characteristic_length;
  if (mesh) {
    if (config.density) {
      const auto props = mass_properties(*mesh, *config.density * 1e-9);
      body.mass = props.mass;
      body.com = config.com.value_or(props.com);
    } else {
      body.mass = *config.mass;
      body.com = config.com ? *config.com : mass_properties(*mesh, 1.0).com;
    }
    if (!(body.characteristic_length > 0.0)) {
      body.characteristic_length = mesh->diagonal();
    }
  } else {
    if (!config.mass || !config.com) {
      throw Error(ErrorCode::InvalidConfig, "mass: mass and com are required when no mesh is given");
    }
    body.mass = *config.mass;
    body.com = *config.com;
  }
  return body;
}

bool PlanReport::any_feasible() const {
  for (const auto& ev : evaluations) {
    if (ev.score.feasible) {
      return true;
    }
  }
  return false;
}

PlanRun run_plan(const PlannerConfig& cfg) {
  if (cfg.screws.empty()) {
    throw Error(ErrorCode::InvalidConfig, "screws: plan needs at least one screw");
  }
  PlanRun run;
  PlanReport& report = run.report;
  const auto mesh = load_mesh(cfg);
  report.body = resolve_body(cfg, mesh ? &*mesh : nullptr);
  report.config_hash = sha256_hex(cfg.canonical_json());
  if (cfg.mesh) {
    report.mesh_hash = sha256_file(*cfg.mesh);
  }

  std::vector<SupportConfig> candidates;
  if (mesh) {
    run.pipeline = run_pipeline(*mesh, report.body.com, cfg.filter);
    for (const auto& stage : run.pipeline->stages) {
      report.stage_counts.emplace_back(stage.stage, stage.points.size());
    }
    report.first_empty = run.pipeline->first_empty;
    const auto grid = partition_grid(run.pipeline->at(Stage::P4), cfg.planner.spacing_d);
    report.candidates = grid.representatives.size();
    EnumerateOptions options;
    options.footprint_radius = cfg.filter.suction_radius;
    options.enforce_pairwise_spacing = cfg.planner.enforce_pairwise_spacing;
    options.one_per_cell = cfg.planner.one_per_cell;
    options.collinear_angle_deg = cfg.planner.collinear_angle_deg;
    for (const int arity : {2, 3}) {
      try {
        auto configs = enumerate_configs(grid, arity, cfg.planner.spacing_d, options);
        candidates.insert(candidates.end(), configs.begin(), configs.end());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooFewCandidates) {
          throw;
        }
      }
    }
  }
  for (const auto& c : cfg.configs) {
    candidates.push_back(from_inline(c, cfg.filter.suction_radius));
  }

  report.evaluations.resize(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    report.evaluations[i] = evaluate(std::move(candidates[i]), cfg, report.body);
  });

  std::vector<SupportConfig> configs;
  std::vector<ConfigScore> scores;
  for (const auto& ev : report.evaluations) {
    configs.push_back(ev.config);
    scores.push_back(ev.score);
  }
  report.ranking = rank_configs(configs, scores);

  std::optional<SupportSet> best2;
  std::optional<SupportSet> best3;
  for (const auto& entry : report.ranking.entries) {
    const auto& ev = report.evaluations[entry.config_index];
    if (!ev.failure.empty()) {
      continue;
    }
    if (ev.arity == 2 && !best2) {
      best2 = ev.config.support_set();
    }
    if (ev.arity == 3 && !best3) {
      best3 = ev.config.support_set();
    }
  }
  if (best2 || best3) {
    report.table = screw_force_table(best2, best3, cfg.screws, cfg.table_press.value_or(cfg.sweep.end), report.body,
                                     cfg.statics, cfg.suction);
  }
  return run;
}

json report_json(const PlanReport& report, const PlannerConfig& cfg, const std::vector<std::string>& artifacts) {
  json counts = json::array();
  for (const auto& [stage, n] : report.stage_counts) {
    counts.push_back({{"stage", to_string(stage)}, {"count", n}});
  }
  std::size_t n2 = 0;
  std::size_t n3 = 0;
  std::size_t feasible = 0;
  for (const auto& ev : report.evaluations) {
    (ev.arity == 2 ? n2 : n3) += 1;
    feasible += ev.score.feasible ? 1 : 0;
  }

  json ranked = json::array();
  const auto top = std::min<std::size_t>(report.ranking.entries.size(), cfg.planner.report_top_k);
  for (std::size_t r = 0; r < top; ++r) {
    const auto& ev = report.evaluations[report.ranking.entries[r].config_index];
    ranked.push_back({{"rank", r + 1},
                      {"id", ev.config.id},
                      {"arity", ev.arity},
                      {"feasible", ev.score.feasible},
                      {"com_inside", ev.config.com_inside},
                      {"worst_suction_N", json_number(ev.score.worst_suction)},
                      {"margin_mm", json_number(ev.score.margin)},
                      {"area_mm2", json_number(ev.score.area)},
                      {"contacts", contacts_json(ev.config)},
                      {"screws", screw_summary(ev, cfg)}});
  }

  json verdicts = json::array();
  if (!report.ranking.entries.empty()) {
    const auto& best = report.evaluations[report.ranking.entries.front().config_index];
    for (std::size_t s = 0; s < cfg.screws.size(); ++s) {
      json v = {{"screw_id", cfg.screws[s].id}, {"config_id", best.config.id}};
      if (s < best.sweeps.size()) {
        const auto& sweep = best.sweeps[s];
        v["feasible"] = best.config.com_inside && sweep.feasible_throughout();
        v["critical_press_N"] = optional_number(sweep.critical_press);
        v["suction_limit_press_N"] = optional_number(sweep.suction_limit_press);
        v["worst_suction_N"] = json_number(sweep.worst_suction_demand());
      } else {
        v["feasible"] = false;
        v["critical_press_N"] = nullptr;
        v["suction_limit_press_N"] = nullptr;
        v["worst_suction_N"] = nullptr;
      }
      verdicts.push_back(v);
    }
  }

  return {{"tool", {{"name", "vacufix"}, {"version", tool_version()}}},
          {"provenance",
           {{"config_sha256", report.config_hash},
            {"mesh_sha256", report.mesh_hash.empty() ? json(nullptr) : json(report.mesh_hash)},
            {"tool_version", tool_version()}}},
          {"body",
           {{"mass_kg", json_number(report.body.mass)},
            {"com_mm", json_vec(report.body.com)},
            {"gravity", json_number(report.body.gravity)}}},
          {"stage_counts", counts},
          {"first_empty_stage", report.first_empty ? json(to_string(*report.first_empty)) : json(nullptr)},
          {"candidates", report.candidates},
          {"configs_evaluated", {{"2P", n2}, {"3P", n3}}},
          {"feasible_configs", feasible},
          {"ranked_configs", ranked},
          {"verdicts", verdicts},
          {"artifacts", artifacts}};
}

int cmd_plan(const PlannerConfig& cfg, std::ostream& out) {
  const PlanRun run = run_plan(cfg);
  const PlanReport& report = run.report;
  const auto& dir = cfg.output_dir;
  std::vector<std::string> artifacts;

  if (run.pipeline) {
    for (const auto& stage : run.pipeline->stages) {
      const std::string name(to_string(stage.stage));
      write_stage_csv(stage, dir / "stages" / (name + ".csv"));
      write_rejected_csv(stage, dir / "stages" / (name + "_rejected.csv"));
      write_stage_ply(stage, dir / "stages" / (name + ".ply"));
      artifacts.push_back("stages/" + name + ".csv");
      artifacts.push_back("stages/" + name + "_rejected.csv");
      artifacts.push_back("stages/" + name + ".ply");
    }
  }

  write_json(configs_json(report, cfg), dir / kConfigsFile);
  artifacts.push_back(kConfigsFile.string());

  std::vector<SweepRecord> records;
  const auto top = std::min<std::size_t>(report.ranking.entries.size(), cfg.planner.report_top_k);
  for (std::size_t r = 0; r < top; ++r) {
    const auto& ev = report.evaluations[report.ranking.entries[r].config_index];
    for (std::size_t s = 0; s < ev.sweeps.size(); ++s) {
      records.push_back({ev.config.id, cfg.screws[s].id, &ev.sweeps[s]});
    }
  }
  write_sweep_csv(records, dir / "sweeps.csv");
  artifacts.push_back("sweeps.csv");

  if (report.table) {
    write_json(force_table_json(*report.table), dir / "table.json");
    artifacts.push_back("table.json");
  }
  artifacts.push_back("report.json");
  write_json(report_json(report, cfg, artifacts), dir / "report.json");

  for (const auto& [stage, n] : report.stage_counts) {
    out << to_string(stage) << ": " << n << "\n";
  }
  std::size_t feasible = 0;
  for (const auto& ev : report.evaluations) {
    feasible += ev.score.feasible ? 1 : 0;
  }
  out << "configurations: " << report.evaluations.size() << " evaluated, " << feasible << " feasible\n";
  if (!report.ranking.entries.empty()) {
    const auto& best = report.evaluations[report.ranking.entries.front().config_index];
    out << "best: " << best.config.id << (best.score.feasible ? " (feasible)" : " (infeasible)") << "\n";
  }
  out << "report: " << (dir / "report.json").string() << "\n";
  return report.any_feasible() ? kExitFeasible : kExitInfeasible;
}

int cmd_filter(const PlannerConfig& cfg, Stage stage, std::ostream& out) {
  const auto mesh = load_mesh(cfg);
  if (!mesh) {
    throw Error(ErrorCode::InvalidConfig, "mesh: the filter command needs a mesh");
  }
  const BodyProperties body = resolve_body(cfg, &*mesh);
  const PipelineResult result = run_pipeline(*mesh, body.com, cfg.filter, stage);
  for (const auto& s : result.stages) {
    out << to_string(s.stage) << ": " << s.points.size() << "\n";
  }
  const StageSet& dump = result.at(stage);
  const std::string name(to_string(stage));
  write_stage_csv(dump, cfg.output_dir / "stages" / (name + ".csv"));
  write_rejected_csv(dump, cfg.output_dir / "stages" / (name + "_rejected.csv"));
  write_stage_ply(dump, cfg.output_dir / "stages" / (name + ".ply"));
  out << "dump: " << (cfg.output_dir / "stages" / (name + ".csv")).string() << "\n";
  return kExitFeasible;
}

EquilibriumResult analyze_equilibrium(const PlannerConfig& cfg,
                                      const std::string& config_id,
                                      const std::string& screw_id,
                                      std::optional<double> press) {
  if (press && !(*press >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "--press must be >= 0");
  }
  const SupportSet supports = find_support(cfg, config_id);
  ScrewSpec screw = find_screw(cfg, screw_id);
  if (press) {
    screw.press_force = *press;
  }
  const auto mesh = load_mesh(cfg);
  const BodyProperties body = resolve_body(cfg, mesh ? &*mesh : nullptr);
  return solve_equilibrium(assemble_system(make_problem(supports, body, screw, cfg.statics)), cfg.suction);
}

SweepResult analyze_sweep(const PlannerConfig& cfg, const std::string& config_id, const std::string& screw_id) {
  const SupportSet supports = find_support(cfg, config_id);
  const ScrewSpec& screw = find_screw(cfg, screw_id);
  const auto mesh = load_mesh(cfg);
  const BodyProperties body = resolve_body(cfg, mesh ? &*mesh : nullptr);
  return sweep_press_force(make_problem(supports, body, screw, cfg.statics), cfg.sweep, cfg.suction);
}

int cmd_analyze(const PlannerConfig& cfg,
                const std::string& config_id,
                const std::string& screw_id,
                std::optional<double> press,
                std::ostream& out) {
  const auto result = analyze_equilibrium(cfg, config_id, screw_id, press);
  const double applied = press ? *press : find_screw(cfg, screw_id).press_force;
  json forces = json::array();
  json suction = json::array();
  for (const double f : result.forces) {
    forces.push_back(json_number(f));
    suction.push_back(f < 0.0);
  }
  const json doc = {{"config_id", config_id},
                    {"screw_id", screw_id},
                    {"press_N", json_number(applied)},
                    {"forces_N", forces},
                    {"suction", suction},
                    {"residual", json_number(result.residual)},
                    {"tolerance", json_number(result.tolerance)},
                    {"limiting_contact", result.limiting_contact},
                    {"feasible", result.feasible}};
  out << doc.dump(2) << "\n";
  return result.feasible ? kExitFeasible : kExitInfeasible;
}

int cmd_sweep(const PlannerConfig& cfg, const std::string& config_id, const std::string& screw_id,
              std::ostream& out) {
  const SweepResult sweep = analyze_sweep(cfg, config_id, screw_id);
  const auto path = cfg.output_dir / ("sweep_" + safe_name(config_id) + "_" + safe_name(screw_id) + ".csv");
  write_sweep_csv({{config_id, screw_id, &sweep}}, path);
  char line[96];
  if (sweep.critical_press) {
    std::snprintf(line, sizeof(line), "critical press %.1f N", *sweep.critical_press);
  } else {
    std::snprintf(line, sizeof(line), "stable through %.1f N", sweep.press_levels.back());
  }
  out << line << "\n";
  if (sweep.suction_limit_press) {
    std::snprintf(line, sizeof(line), "suction limit exceeded at %.1f N", *sweep.suction_limit_press);
    out << line << "\n";
  }
  out << "csv: " << path.string() << "\n";
  return sweep.critical_press ? kExitInfeasible : kExitFeasible;
}

} // namespace vacufix

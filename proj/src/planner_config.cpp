#include "vacufix/planner_config.hpp"

#include "vacufix/error.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vacufix {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, field + ": " + why);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    fail(path.empty() ? "<root>" : path, "expected an object");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      fail(join(path, key), "unknown key");
    }
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(path, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    fail(path, "must be finite");
  }
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    fail(path, "expected an integer");
  }
  return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) {
    fail(path, "expected true or false");
  }
  return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) {
    fail(path, "expected a string");
  }
  return j.get<std::string>();
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    fail(path, "expected [x, y, z]");
  }
  return Vec3(number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]"));
}

Vec3 unit_vec3(const json& j, const std::string& path) {
  const Vec3 v = vec3(j, path);
  if (!(v.norm() > 0.0)) {
    fail(path, "must be a non-zero vector");
  }
  return v.normalized();
}

template <typename F>
void optional_field(const json& obj, const char* key, const std::string& prefix, F&& apply) {
  if (const auto it = obj.find(key); it != obj.end()) {
    apply(*it, join(prefix, key));
  }
}

void parse_filter(const json& j, FilterParams& f) {
  const std::string p = "filter";
  require_object(j, p);
  reject_unknown(j,
                 {"grid_pitch", "knn_k", "theta_max", "ring_rays", "suction_radius", "coverage_tau",
                  "continuity_delta", "ring_window", "visibility_skip", "neighbor_source"},
                 p);
  optional_field(j, "grid_pitch", p, [&](const json& v, const std::string& n) { f.grid_pitch = number(v, n); });
  optional_field(j, "knn_k", p, [&](const json& v, const std::string& n) { f.knn_k = integer(v, n); });
  optional_field(j, "theta_max", p, [&](const json& v, const std::string& n) { f.theta_max = number(v, n); });
  optional_field(j, "ring_rays", p, [&](const json& v, const std::string& n) { f.ring_rays = integer(v, n); });
  optional_field(j, "suction_radius", p,
                 [&](const json& v, const std::string& n) { f.suction_radius = number(v, n); });
  optional_field(j, "coverage_tau", p, [&](const json& v, const std::string& n) { f.coverage_tau = number(v, n); });
  optional_field(j, "continuity_delta", p,
                 [&](const json& v, const std::string& n) { f.continuity_delta = number(v, n); });
  optional_field(j, "ring_window", p, [&](const json& v, const std::string& n) { f.ring_window = number(v, n); });
  optional_field(j, "visibility_skip", p,
                 [&](const json& v, const std::string& n) { f.visibility_skip = number(v, n); });
  optional_field(j, "neighbor_source", p, [&](const json& v, const std::string& n) {
    const std::string s = text(v, n);
    if (s == "Psupport") {
      f.neighbor_source = NeighborSource::Psupport;
    } else if (s == "P3") {
      f.neighbor_source = NeighborSource::P3;
    } else {
      fail(n, "must be \"Psupport\" or \"P3\", got \"" + s + "\"");
    }
  });
}

void parse_planner(const json& j, PlannerSettings& s) {
  const std::string p = "planner";
  require_object(j, p);
  reject_unknown(j,
                 {"spacing_d", "samples_per_circle", "enforce_pairwise_spacing", "one_per_cell",
                  "collinear_angle_deg", "report_top_k"},
                 p);
  optional_field(j, "spacing_d", p, [&](const json& v, const std::string& n) { s.spacing_d = number(v, n); });
  optional_field(j, "samples_per_circle", p,
                 [&](const json& v, const std::string& n) { s.samples_per_circle = integer(v, n); });
  optional_field(j, "enforce_pairwise_spacing", p,
                 [&](const json& v, const std::string& n) { s.enforce_pairwise_spacing = boolean(v, n); });
  optional_field(j, "one_per_cell", p, [&](const json& v, const std::string& n) { s.one_per_cell = boolean(v, n); });
  optional_field(j, "collinear_angle_deg", p,
                 [&](const json& v, const std::string& n) { s.collinear_angle_deg = number(v, n); });
  optional_field(j, "report_top_k", p, [&](const json& v, const std::string& n) { s.report_top_k = integer(v, n); });
  if (!(s.spacing_d > 0.0)) {
    fail("planner.spacing_d", "must be positive");
  }
  if (s.samples_per_circle < 2) {
    fail("planner.samples_per_circle", "must be >= 2");
  }
  if (!(s.collinear_angle_deg >= 0.0 && s.collinear_angle_deg < 60.0)) {
    fail("planner.collinear_angle_deg", "must lie in [0, 60)");
  }
  if (s.report_top_k < 1) {
    fail("planner.report_top_k", "must be >= 1");
  }
}

ScrewSpec parse_screw(const json& j, const std::string& p) {
  require_object(j, p);
  reject_unknown(j, {"id", "position", "axis", "press"}, p);
  ScrewSpec s;
  if (!j.contains("id")) {
    fail(p + ".id", "required");
  }
  if (!j.contains("position")) {
    fail(p + ".position", "required");
  }
  s.id = text(j["id"], p + ".id");
  if (s.id.empty()) {
    fail(p + ".id", "must not be empty");
  }
  s.position = vec3(j["position"], p + ".position");
  optional_field(j, "axis", p, [&](const json& v, const std::string& n) { s.axis = unit_vec3(v, n); });
  optional_field(j, "press", p, [&](const json& v, const std::string& n) { s.press_force = number(v, n); });
  if (!(s.press_force >= 0.0)) {
    fail(p + ".press", "must be >= 0");
  }
  return s;
}

InlineConfig parse_inline(const json& j, const std::string& p) {
  require_object(j, p);
  reject_unknown(j, {"id", "contacts", "normals"}, p);
  InlineConfig c;
  if (!j.contains("id")) {
    fail(p + ".id", "required");
  }
  c.id = text(j["id"], p + ".id");
  if (!j.contains("contacts") || !j["contacts"].is_array()) {
    fail(p + ".contacts", "expected a list of [x, y, z]");
  }
  for (std::size_t i = 0; i < j["contacts"].size(); ++i) {
    c.contacts.push_back(vec3(j["contacts"][i], p + ".contacts[" + std::to_string(i) + "]"));
  }
  if (c.contacts.size() < 2 || c.contacts.size() > 3) {
    fail(p + ".contacts", "needs 2 or 3 contacts");
  }
  optional_field(j, "normals", p, [&](const json& v, const std::string& n) {
    if (!v.is_array() || v.size() != c.contacts.size()) {
      fail(n, "needs one normal per contact");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec3 normal = unit_vec3(v[i], n + "[" + std::to_string(i) + "]");
      if (!(normal.z() > 0.0)) {
        fail(n + "[" + std::to_string(i) + "]", "must point upward (z > 0)");
      }
      c.normals.push_back(normal);
    }
  });
  return c;
}

json to_json(const Vec3& v) {
  return json::array({v.x(), v.y(), v.z()});
}

} // namespace

PlannerConfig parse_planner_config(const std::string& source_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(source_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "");
  reject_unknown(root,
                 {"mesh", "density", "mass", "com", "gravity", "characteristic_length", "filter", "planner",
                  "suction", "sweep", "statics", "screws", "configs", "output_dir"},
                 "");

  PlannerConfig cfg;
  optional_field(root, "mesh", "", [&](const json& v, const std::string& n) {
    const std::filesystem::path path = base_dir / text(v, n);
    if (!std::filesystem::is_regular_file(path)) {
      fail(n, "file not found: " + path.string());
    }
    cfg.mesh = path;
  });
  optional_field(root, "density", "", [&](const json& v, const std::string& n) {
    cfg.density = number(v, n);
    if (!(*cfg.density > 0.0)) {
      fail(n, "must be positive (kg/m^3)");
    }
  });
  optional_field(root, "mass", "", [&](const json& v, const std::string& n) {
    cfg.mass = number(v, n);
    if (!(*cfg.mass > 0.0)) {
      fail(n, "must be positive (kg)");
    }
  });
  optional_field(root, "com", "", [&](const json& v, const std::string& n) { cfg.com = vec3(v, n); });
  optional_field(root, "gravity", "", [&](const json& v, const std::string& n) {
    cfg.gravity = number(v, n);
    if (!(cfg.gravity >= 0.0)) {
      fail(n, "must be >= 0");
    }
  });
  optional_field(root, "characteristic_length", "",
                 [&](const json& v, const std::string& n) { cfg.characteristic_length = number(v, n); });
  if (cfg.density && cfg.mass) {
    fail("density", "give either density or mass, not both");
  }
  if (!cfg.density && !cfg.mass) {
    fail("mass", "one of mass or density is required");
  }
  if (cfg.density && !cfg.mesh) {
    fail("density", "needs a mesh to integrate");
  }
  if (!cfg.mesh && !cfg.com) {
    fail("com", "required when no mesh is given");
  }

  optional_field(root, "filter", "", [&](const json& v, const std::string&) { parse_filter(v, cfg.filter); });
  try {
    cfg.filter.validate();
  } catch (const Error& e) {
    // Re-issue with the section prefix: "filter.coverage_tau must lie ...".
    const std::string what = e.what();
    throw Error(ErrorCode::InvalidConfig, "filter." + what.substr(what.find(": ") + 2));
  }
  optional_field(root, "planner", "", [&](const json& v, const std::string&) { parse_planner(v, cfg.planner); });

  optional_field(root, "suction", "", [&](const json& v, const std::string& n) {
    require_object(v, n);
    reject_unknown(v, {"f_max"}, n);
    optional_field(v, "f_max", n, [&](const json& f, const std::string& fn) { cfg.suction.f_max = number(f, fn); });
  });
  if (!(cfg.suction.f_max > 0.0)) {
    fail("suction.f_max", "must be positive");
  }

  optional_field(root, "sweep", "", [&](const json& v, const std::string& n) {
    require_object(v, n);
    reject_unknown(v, {"start", "end", "step"}, n);
    optional_field(v, "start", n, [&](const json& f, const std::string& fn) { cfg.sweep.start = number(f, fn); });
    optional_field(v, "end", n, [&](const json& f, const std::string& fn) { cfg.sweep.end = number(f, fn); });
    optional_field(v, "step", n, [&](const json& f, const std::string& fn) { cfg.sweep.step = number(f, fn); });
  });
  if (!(cfg.sweep.step > 0.0)) {
    fail("sweep.step", "must be positive");
  }
  if (!(cfg.sweep.start >= 0.0 && cfg.sweep.end >= cfg.sweep.start)) {
    fail("sweep.end", "range must satisfy 0 <= start <= end");
  }

  optional_field(root, "statics", "", [&](const json& v, const std::string& n) {
    require_object(v, n);
    reject_unknown(v, {"ignore_press_moment", "vertical_normals", "table_press"}, n);
    optional_field(v, "ignore_press_moment", n, [&](const json& f, const std::string& fn) {
      cfg.statics.ignore_press_moment = boolean(f, fn);
    });
    optional_field(v, "vertical_normals", n,
                   [&](const json& f, const std::string& fn) { cfg.statics.vertical_normals = boolean(f, fn); });
    optional_field(v, "table_press", n, [&](const json& f, const std::string& fn) {
      cfg.table_press = number(f, fn);
      if (!(*cfg.table_press >= 0.0)) {
        fail(fn, "must be >= 0");
      }
    });
  });

  optional_field(root, "screws", "", [&](const json& v, const std::string& n) {
    if (!v.is_array()) {
      fail(n, "expected a list");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = n + "[" + std::to_string(i) + "]";
      cfg.screws.push_back(parse_screw(v[i], p));
      if (!ids.insert(cfg.screws.back().id).second) {
        fail(p + ".id", "duplicate id \"" + cfg.screws.back().id + "\"");
      }
    }
  });
  optional_field(root, "configs", "", [&](const json& v, const std::string& n) {
    if (!v.is_array()) {
      fail(n, "expected a list");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = n + "[" + std::to_string(i) + "]";
      cfg.configs.push_back(parse_inline(v[i], p));
      if (!ids.insert(cfg.configs.back().id).second) {
        fail(p + ".id", "duplicate id \"" + cfg.configs.back().id + "\"");
      }
    }
  });
  optional_field(root, "output_dir", "", [&](const json& v, const std::string& n) {
    const std::string s = text(v, n);
    if (s.empty()) {
      fail(n, "must not be empty");
    }
    cfg.output_dir = base_dir / s;
  });
  if (!root.contains("output_dir")) {
    cfg.output_dir = base_dir / cfg.output_dir;
  }
  return cfg;
}

PlannerConfig load_planner_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open config " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  PlannerConfig cfg = parse_planner_config(buf.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

std::string PlannerConfig::canonical_json() const {
  json j;
  j["mesh"] = mesh ? json(mesh->filename().string()) : json(nullptr);
  j["density"] = density ? json(*density) : json(nullptr);
  j["mass"] = mass ? json(*mass) : json(nullptr);
  j["com"] = com ? to_json(*com) : json(nullptr);
  j["gravity"] = gravity;
  j["characteristic_length"] = characteristic_length;
  j["filter"] = {{"grid_pitch", filter.grid_pitch},
                 {"knn_k", filter.knn_k},
                 {"theta_max", filter.theta_max},
                 {"ring_rays", filter.ring_rays},
                 {"suction_radius", filter.suction_radius},
                 {"coverage_tau", filter.coverage_tau},
                 {"continuity_delta", filter.continuity_delta},
                 {"ring_window", filter.ring_window},
                 {"visibility_skip", filter.visibility_skip},
                 {"neighbor_source", filter.neighbor_source == NeighborSource::Psupport ? "Psupport" : "P3"}};
  j["planner"] = {{"spacing_d", planner.spacing_d},
                  {"samples_per_circle", planner.samples_per_circle},
                  {"enforce_pairwise_spacing", planner.enforce_pairwise_spacing},
                  {"one_per_cell", planner.one_per_cell},
                  {"collinear_angle_deg", planner.collinear_angle_deg},
                  {"report_top_k", planner.report_top_k}};
  j["suction"] = {{"f_max", suction.f_max}};
  j["sweep"] = {{"start", sweep.start}, {"end", sweep.end}, {"step", sweep.step}};
  j["statics"] = {{"ignore_press_moment", statics.ignore_press_moment},
                  {"vertical_normals", statics.vertical_normals},
                  {"table_press", table_press ? json(*table_press) : json(nullptr)}};
  j["screws"] = json::array();
  for (const auto& s : screws) {
    j["screws"].push_back({{"id", s.id}, {"position", to_json(s.position)}, {"axis", to_json(s.axis)},
                           {"press", s.press_force}});
  }
  j["configs"] = json::array();
  for (const auto& c : configs) {
    json contacts = json::array();
    for (const auto& p : c.contacts) {
      contacts.push_back(to_json(p));
    }
    json normals = json::array();
    for (const auto& n : c.normals) {
      normals.push_back(to_json(n));
    }
    j["configs"].push_back({{"id", c.id}, {"contacts", contacts}, {"normals", normals}});
  }
  return j.dump();
}

} // namespace vacufix

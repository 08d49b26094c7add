#include "vacufix/artifacts.hpp"

#include "vacufix/error.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vacufix {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  return out;
}

void point_columns(std::ostream& out, const SamplePoint& p) {
  out << format_sig6(p.position.x()) << ',' << format_sig6(p.position.y()) << ',' << format_sig6(p.position.z())
      << ',' << format_sig6(p.normal.x()) << ',' << format_sig6(p.normal.y()) << ',' << format_sig6(p.normal.z());
}

} // namespace

double round_sig6(double value) {
  if (!std::isfinite(value)) {
    return value;
  }
  return std::stod(format_sig6(value));
}

std::string format_sig6(double value) {
  if (value == 0.0) {
    return "0"; // folds -0
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

nlohmann::json json_number(double value) {
  if (!std::isfinite(value)) {
    return nullptr;
  }
  return round_sig6(value);
}

nlohmann::json json_vec(const Vec3& v) {
  return nlohmann::json::array({json_number(v.x()), json_number(v.y()), json_number(v.z())});
}

nlohmann::json json_vec(const Vec2& v) {
  return nlohmann::json::array({json_number(v.x()), json_number(v.y())});
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void write_stage_csv(const StageSet& stage, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "x,y,z,nx,ny,nz\n";
  for (const auto& p : stage.points) {
    point_columns(out, p);
    out << '\n';
  }
}

void write_rejected_csv(const StageSet& stage, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "x,y,z,nx,ny,nz,reason\n";
  for (const auto& r : stage.rejected) {
    point_columns(out, r.point);
    out << ',' << to_string(r.reason) << '\n';
  }
}

void write_stage_ply(const StageSet& stage, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");
  auto out = open_out(path, true);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "comment stage " << to_string(stage.stage) << "\n"
      << "element vertex " << stage.points.size() << "\n";
  for (const char* name : {"x", "y", "z", "nx", "ny", "nz"}) {
    out << "property double " << name << "\n";
  }
  out << "end_header\n";
  for (const auto& p : stage.points) {
    const double row[6] = {p.position.x(), p.position.y(), p.position.z(), p.normal.x(), p.normal.y(), p.normal.z()};
    out.write(reinterpret_cast<const char*>(row), sizeof(row));
  }
}

void write_sweep_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "config_id,screw_id,press_N,balloon_index,force_N,feasible\n";
  for (const auto& rec : records) {
    const SweepResult& sweep = *rec.sweep;
    for (std::size_t level = 0; level < sweep.press_levels.size(); ++level) {
      const auto& result = sweep.results[level];
      for (std::size_t b = 0; b < result.forces.size(); ++b) {
        out << rec.config_id << ',' << rec.screw_id << ',' << format_sig6(sweep.press_levels[level]) << ',' << b
            << ',' << format_sig6(result.forces[b]) << ',' << (result.feasible ? 1 : 0) << '\n';
      }
    }
  }
}

nlohmann::json force_table_json(const ForceTable& table) {
  using nlohmann::json;
  auto cell = [](const std::optional<ForceTableCell>& c) -> json {
    if (!c) {
      return nullptr;
    }
    json forces = json::array();
    for (const double f : c->forces) {
      forces.push_back(json_number(f));
    }
    json suction = json::array();
    for (const bool s : c->suction) {
      suction.push_back(s);
    }
    return {{"config_id", c->config_id},
            {"forces_N", forces},
            {"suction", suction},
            {"residual", json_number(c->residual)},
            {"feasible", c->feasible}};
  };
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"screw_id", row.screw_id}, {"2P", cell(row.two_point)}, {"3P", cell(row.three_point)}});
  }
  return {{"press_N", json_number(table.press)}, {"rows", rows}};
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  write_text(doc.dump(2) + "\n", path);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  auto out = open_out(path, true);
  out << text;
}

} // namespace vacufix

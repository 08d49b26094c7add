#pragma once

#include "vacufix/candidate_filter.hpp"
#include "vacufix/statics.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vacufix {

// Output numbers carry 6 significant digits so reports are byte-stable.
double round_sig6(double value);
std::string format_sig6(double value);

nlohmann::json json_number(double value); // null for non-finite values
nlohmann::json json_vec(const Vec3& v);
nlohmann::json json_vec(const Vec2& v);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Kept points: x,y,z,nx,ny,nz
void write_stage_csv(const StageSet& stage, const std::filesystem::path& path);
// Removed points: x,y,z,nx,ny,nz,reason
void write_rejected_csv(const StageSet& stage, const std::filesystem::path& path);
// Binary little-endian PLY with double x,y,z,nx,ny,nz vertex properties.
void write_stage_ply(const StageSet& stage, const std::filesystem::path& path);

struct SweepRecord {
  std::string config_id;
  std::string screw_id;
  const SweepResult* sweep = nullptr;
};

// config_id,screw_id,press_N,balloon_index,force_N,feasible
void write_sweep_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);

nlohmann::json force_table_json(const ForceTable& table);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

} // namespace vacufix

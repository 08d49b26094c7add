#include "vacufix/error.hpp"
#include "vacufix/mesh.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

namespace vacufix {

namespace {

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kRecordBytes = 50;

static_assert(std::endian::native == std::endian::little, "STL I/O assumes a little-endian host");

class Welder {
 public:
  std::uint32_t add(const Vec3& v) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(vertices_.size()));
    if (inserted) {
      vertices_.push_back(v);
    }
    return it->second;
  }

  std::vector<Vec3> take_vertices() {
    return std::move(vertices_);
  }

 private:
  std::map<std::array<double, 3>, std::uint32_t> index_;
  std::vector<Vec3> vertices_;
};

bool looks_ascii(const std::string& bytes) {
  std::size_t pos = bytes.find_first_not_of(" \t\r\n");
  if (pos == std::string::npos || bytes.compare(pos, 5, "solid") != 0) {
    return false;
  }
  const auto window = bytes.substr(0, std::min<std::size_t>(bytes.size(), 1024));
  return window.find("facet") != std::string::npos || window.find("endsolid") != std::string::npos;
}

TriMesh parse_ascii(const std::string& bytes, const std::filesystem::path& path, const LoadOptions& options) {
  std::istringstream in(bytes);
  in.imbue(std::locale::classic());
  Welder welder;
  std::vector<Triangle> triangles;
  std::array<std::uint32_t, 3> corner{};
  int corners = 0;
  std::string token;
  while (in >> token) {
    if (token != "vertex") {
      continue;
    }
    double x, y, z;
    if (!(in >> x >> y >> z)) {
      throw Error(ErrorCode::UnreadableFile, "malformed vertex line in " + path.string());
    }
    corner[corners++] = welder.add(Vec3(x, y, z));
    if (corners == 3) {
      triangles.push_back(corner);
      corners = 0;
    }
  }
  if (corners != 0) {
    throw Error(ErrorCode::UnreadableFile, "facet with fewer than three vertices in " + path.string());
  }
  return TriMesh(welder.take_vertices(), std::move(triangles), options.area_epsilon);
}

TriMesh parse_binary(const std::string& bytes, const std::filesystem::path& path, const LoadOptions& options) {
  std::uint32_t declared = 0;
  std::memcpy(&declared, bytes.data() + kHeaderBytes, sizeof(declared));
  const std::size_t payload = bytes.size() - kHeaderBytes - 4;
  const std::size_t available = payload / kRecordBytes;
  if (declared > available) {
    throw Error(ErrorCode::TruncatedBinary,
                path.string() + " declares " + std::to_string(declared) + " triangles but holds " +
                    std::to_string(available));
  }
  Welder welder;
  std::vector<Triangle> triangles;
  triangles.reserve(declared);
  const char* record = bytes.data() + kHeaderBytes + 4;
  for (std::uint32_t i = 0; i < declared; ++i, record += kRecordBytes) {
    Triangle tri{};
    for (int c = 0; c < 3; ++c) {
      float xyz[3];
      std::memcpy(xyz, record + 12 + 12 * c, sizeof(xyz));
      tri[c] = welder.add(Vec3(xyz[0], xyz[1], xyz[2]));
    }
    triangles.push_back(tri);
  }
  return TriMesh(welder.take_vertices(), std::move(triangles), options.area_epsilon);
}

} // namespace

TriMesh load_stl(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (bytes.empty()) {
    throw Error(ErrorCode::UnreadableFile, path.string() + " is empty");
  }
  if (bytes.size() >= kHeaderBytes + 4) {
    std::uint32_t declared = 0;
    std::memcpy(&declared, bytes.data() + kHeaderBytes, sizeof(declared));
    const bool exact_binary = bytes.size() == kHeaderBytes + 4 + std::size_t{declared} * kRecordBytes;
    if (exact_binary || !looks_ascii(bytes)) {
      return parse_binary(bytes, path, options);
    }
  } else if (!looks_ascii(bytes)) {
    throw Error(ErrorCode::UnreadableFile, path.string() + " is neither ASCII nor binary STL");
  }
  return parse_ascii(bytes, path, options);
}

void save_stl_binary(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  char header[kHeaderBytes] = {};
  std::memcpy(header, "vacufix binary stl", 18);
  out.write(header, kHeaderBytes);
  const auto count = static_cast<std::uint32_t>(mesh.triangles().size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  const auto& vs = mesh.vertices();
  for (std::size_t i = 0; i < mesh.triangles().size(); ++i) {
    float record[12];
    const Vec3 n = mesh.facet_normal(i);
    for (int k = 0; k < 3; ++k) {
      record[k] = static_cast<float>(n[k]);
    }
    for (int c = 0; c < 3; ++c) {
      const Vec3& v = vs[mesh.triangles()[i][c]];
      for (int k = 0; k < 3; ++k) {
        record[3 + 3 * c + k] = static_cast<float>(v[k]);
      }
    }
    out.write(reinterpret_cast<const char*>(record), sizeof(record));
    const std::uint16_t attributes = 0;
    out.write(reinterpret_cast<const char*>(&attributes), sizeof(attributes));
  }
}

void save_stl_ascii(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  out.imbue(std::locale::classic());
  out << std::setprecision(9) << "solid vacufix\n";
  const auto& vs = mesh.vertices();
  for (std::size_t i = 0; i < mesh.triangles().size(); ++i) {
    const Vec3 n = mesh.facet_normal(i);
    out << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n    outer loop\n";
    for (const auto idx : mesh.triangles()[i]) {
      out << "      vertex " << vs[idx].x() << ' ' << vs[idx].y() << ' ' << vs[idx].z() << '\n';
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid vacufix\n";
}

} // namespace vacufix

// Writes the demo meshes and planner configs used in the README.
#include "vacufix/mesh.hpp"
#include "vacufix/shapes.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  std::cout << "wrote " << path.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
  using namespace vacufix;
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("scenes");
  fs::create_directories(dir);

  save_stl_binary(shapes::box(Vec3::Zero(), Vec3(200, 200, 10)), dir / "plate.stl");
  save_stl_binary(shapes::grooved_plate(160, 100, 15, 71, 89, 4), dir / "grooved_plate.stl");
  save_stl_binary(shapes::appliance_housing(), dir / "housing.stl");
  std::cout << "wrote meshes to " << dir.string() << "\n";

  write(dir / "plate.json", R"({
  "mesh": "plate.stl",
  "density": 2700,
  "statics": { "vertical_normals": true },
  "screws": [
    { "id": "center", "position": [100, 100, 10] },
    { "id": "corner", "position": [20, 20, 10] }
  ],
  "output_dir": "out_plate"
}
)");

  write(dir / "grooved.json", R"({
  "mesh": "grooved_plate.stl",
  "density": 1200,
  "screws": [ { "id": "s0", "position": [80, 50, 15] } ],
  "output_dir": "out_grooved"
}
)");

  write(dir / "housing.json", R"({
  "mesh": "housing.stl",
  "density": 1050,
  "statics": { "vertical_normals": true },
  "screws": [
    { "id": "s0", "position": [120, 80, 70] },
    { "id": "s1", "position": [40, 40, 70] },
    { "id": "s2", "position": [200, 40, 70] },
    { "id": "s3", "position": [200, 120, 70] },
    { "id": "s4", "position": [40, 120, 70] }
  ],
  "output_dir": "out_housing"
}
)");

  write(dir / "tripod.json", R"({
  "mass": 1.0,
  "com": [0, 0, 30],
  "statics": { "vertical_normals": true },
  "screws": [
    { "id": "center", "position": [0, 0, 60], "press": 6 },
    { "id": "outside", "position": [-110, 15, 60] }
  ],
  "configs": [
    { "id": "tripod", "contacts": [[60, 0, 0], [-30, 51.961524227, 0], [-30, -51.961524227, 0]] }
  ],
  "output_dir": "out_tripod"
}
)");
  return 0;
}

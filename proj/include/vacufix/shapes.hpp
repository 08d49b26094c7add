#pragma once

#include "vacufix/geometry.hpp"
#include "vacufix/mesh.hpp"

#include <vector>

// Closed, outward-wound synthetic solids for fixtures, tests and demos.
namespace vacufix::shapes {

TriMesh box(const Vec3& lo, const Vec3& hi);

// Simple polygon in the XZ plane (counter-clockwise with x right, z up)
// extruded along Y over [y0, y1].
TriMesh extrude_xz(const std::vector<Vec2>& profile, double y0, double y1);

TriMesh uv_sphere(const Vec3& center, double radius, int rings, int segments);

TriMesh flipped(const TriMesh& mesh);
TriMesh merged(const std::vector<TriMesh>& parts);

// Underside drops to z = step_height for x >= step_x.
TriMesh stepped_plate(double length, double width, double thickness, double step_x, double step_height);

// Full-width underside groove spanning x in [x0, x1].
TriMesh grooved_plate(double length, double width, double thickness, double x0, double x1, double depth);

// Closed box with an inward-facing cavity shell (wall thickness on every side).
TriMesh hollow_box(const Vec3& lo, const Vec3& hi, double wall);

// Housing with an underside groove, an internal cavity and an internal shelf
// block: enough structure to exercise every candidate filter.
TriMesh appliance_housing();

} // namespace vacufix::shapes

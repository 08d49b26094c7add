#pragma once

#include "vacufix/geometry.hpp"

#include <vector>

namespace vacufix {

// Andrew's monotone chain. Counter-clockwise, no repeated or collinear
// vertices. Degenerate inputs yield 1 or 2 vertices.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

double polygon_area(const std::vector<Vec2>& ccw_polygon);

// Signed distance from p to the boundary of a CCW convex polygon: positive
// inside, negative outside. Segments and single points are treated as
// zero-area regions, so every query point gets a non-positive value.
double signed_boundary_distance(const std::vector<Vec2>& ccw_polygon, const Vec2& p);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

} // namespace vacufix

#include "vacufix/config_planner.hpp"

#include "vacufix/error.hpp"
#include "vacufix/hull2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace vacufix {

GridPartition partition_grid(const StageSet& points, double spacing_d) {
  if (!(spacing_d > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "spacing_d must be positive");
  }
  GridPartition grid;
  grid.cell_side = spacing_d / std::sqrt(2.0);
  grid.points = points.points;
  if (grid.points.empty()) {
    return grid;
  }
  grid.origin = planar(grid.points.front().position);
  for (const auto& p : grid.points) {
    grid.origin = grid.origin.cwiseMin(planar(p.position));
  }
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const Vec2 rel = (planar(grid.points[i].position) - grid.origin) / grid.cell_side;
    const std::array<int, 2> key{static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y()))};
    grid.cells[key].push_back(i);
  }
  auto lexicographic = [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  };
  for (const auto& [key, members] : grid.cells) {
    const Vec2 center = grid.origin + grid.cell_side * Vec2(key[0] + 0.5, key[1] + 0.5);
    std::size_t best = members.front();
    double best_d2 = (planar(grid.points[best].position) - center).squaredNorm();
    for (const auto idx : members) {
      const double d2 = (planar(grid.points[idx].position) - center).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && lexicographic(grid.points[idx].position, grid.points[best].position))) {
        best = idx;
        best_d2 = d2;
      }
    }
    grid.representatives.push_back(best);
  }
  return grid;
}

double SupportConfig::area() const {
  return polygon_area(hull_vertices);
}

SupportSet SupportConfig::support_set() const {
  SupportSet set;
  set.id = id;
  for (const auto& c : contacts) {
    set.contacts.push_back(c.position);
    set.normals.push_back(c.normal);
  }
  return set;
}

namespace {

double min_interior_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle_at = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p;
    const Vec2 v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  return std::min({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
}

std::string config_id(int arity, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%dP-%05zu", arity, index);
  return buf;
}

} // namespace

std::vector<SupportConfig> enumerate_configs(const GridPartition& partition,
                                             int arity,
                                             double spacing_d,
                                             const EnumerateOptions& options) {
  if (arity != 2 && arity != 3) {
    throw Error(ErrorCode::InvalidArgument, "arity must be 2 or 3");
  }
  std::vector<std::size_t> pool = partition.representatives;
  if (!options.one_per_cell) {
    pool.resize(partition.points.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }
  if (pool.size() < static_cast<std::size_t>(arity)) {
    throw Error(ErrorCode::TooFewCandidates,
                "need " + std::to_string(arity) + " candidates, have " + std::to_string(pool.size()));
  }
  const double spacing2 = spacing_d * spacing_d;
  auto spaced = [&](std::size_t a, std::size_t b) {
    if (!options.enforce_pairwise_spacing) {
      return true;
    }
    return (planar(partition.points[a].position) - planar(partition.points[b].position)).squaredNorm() >= spacing2;
  };
  const double collinear_limit = deg_to_rad(options.collinear_angle_deg);

  std::vector<SupportConfig> configs;
  auto emit = [&](std::initializer_list<std::size_t> members) {
    SupportConfig config;
    config.id = config_id(arity, configs.size());
    config.footprint_radius = options.footprint_radius;
    for (const auto m : members) {
      config.contacts.push_back(partition.points[m]);
    }
    configs.push_back(std::move(config));
  };

  const std::size_t n = pool.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!spaced(pool[i], pool[j])) {
        continue;
      }
      if (arity == 2) {
        emit({pool[i], pool[j]});
        continue;
      }
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!spaced(pool[i], pool[k]) || !spaced(pool[j], pool[k])) {
          continue;
        }
        const double angle = min_interior_angle(planar(partition.points[pool[i]].position),
                                                planar(partition.points[pool[j]].position),
                                                planar(partition.points[pool[k]].position));
        if (angle < collinear_limit) {
          continue;
        }
        emit({pool[i], pool[j], pool[k]});
      }
    }
  }
  return configs;
}

std::vector<Vec2> footprint_hull(const SupportConfig& config, int samples_per_circle) {
  if (samples_per_circle < 2) {
    throw Error(ErrorCode::InvalidArgument, "samples_per_circle must be >= 2");
  }
  double phase = 0.0;
  if (config.contacts.size() >= 2) {
    const Vec2 baseline = planar(config.contacts[1].position) - planar(config.contacts[0].position);
    phase = std::atan2(baseline.x(), -baseline.y()); // direction of (-by, bx)
  }
  std::vector<Vec2> samples;
  samples.reserve(config.contacts.size() * samples_per_circle);
  for (const auto& c : config.contacts) {
    const Vec2 center = planar(c.position);
    for (int k = 0; k < samples_per_circle; ++k) {
      const double angle = phase + 2.0 * EIGEN_PI * k / samples_per_circle;
      samples.push_back(center + config.footprint_radius * Vec2(std::cos(angle), std::sin(angle)));
    }
  }
  return convex_hull(std::move(samples));
}

InclusionResult com_inclusion_test(const SupportConfig& config, const Vec3& com) {
  InclusionResult result;
  result.margin = signed_boundary_distance(config.hull_vertices, planar(com));
  result.com_inside = result.margin > kHullEpsilon;
  return result;
}

void evaluate_stability(SupportConfig& config, const Vec3& com, int samples_per_circle) {
  config.hull_vertices = footprint_hull(config, samples_per_circle);
  const auto inclusion = com_inclusion_test(config, com);
  config.com_inside = inclusion.com_inside;
  config.margin = inclusion.margin;
}

ConfigScore score_config(const SupportConfig& config, const std::vector<SweepResult>& sweeps) {
  ConfigScore score;
  score.feasible = config.com_inside;
  for (const auto& sweep : sweeps) {
    score.feasible = score.feasible && sweep.feasible_throughout();
    score.worst_suction = std::max(score.worst_suction, sweep.worst_suction_demand());
  }
  score.margin = config.margin;
  score.area = config.area();
  return score;
}

RankedPlan rank_configs(const std::vector<SupportConfig>& configs, const std::vector<ConfigScore>& scores) {
  if (configs.size() != scores.size()) {
    throw Error(ErrorCode::InvalidArgument, "one score per configuration required");
  }
  std::vector<std::size_t> order(configs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto contact_less = [&](std::size_t a, std::size_t b) {
    const auto& ca = configs[a].contacts;
    const auto& cb = configs[b].contacts;
    for (std::size_t i = 0; i < std::min(ca.size(), cb.size()); ++i) {
      const Vec3& pa = ca[i].position;
      const Vec3& pb = cb[i].position;
      for (int k = 0; k < 3; ++k) {
        if (pa[k] != pb[k]) {
          return pa[k] < pb[k];
        }
      }
    }
    if (ca.size() != cb.size()) {
      return ca.size() < cb.size();
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = scores[a];
    const auto& sb = scores[b];
    if (sa.feasible != sb.feasible) {
      return sa.feasible;
    }
    if (sa.worst_suction != sb.worst_suction) {
      return sa.worst_suction < sb.worst_suction;
    }
    if (sa.margin != sb.margin) {
      return sa.margin > sb.margin;
    }
    if (sa.area != sb.area) {
      return sa.area > sb.area;
    }
    return contact_less(a, b);
  });
  RankedPlan plan;
  for (const auto idx : order) {
    plan.entries.push_back({idx, scores[idx]});
  }
  return plan;
}

RankedPlan rank_configs(const std::vector<SupportConfig>& configs,
                        const std::vector<std::vector<SweepResult>>& sweeps) {
  if (configs.size() != sweeps.size()) {
    throw Error(ErrorCode::InvalidArgument, "one sweep set per configuration required");
  }
  std::vector<ConfigScore> scores;
  scores.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    scores.push_back(score_config(configs[i], sweeps[i]));
  }
  return rank_configs(configs, scores);
}

} // namespace vacufix

#include "vacufix/statics.hpp"

#include "vacufix/error.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace vacufix {

namespace {

// Relative singular-value floor below which the contact geometry cannot
// resist moments independently.
constexpr double kRankTolerance = 1e-9;

double scene_length(const EquilibriumProblem& p) {
  Box3 box(p.body.com);
  box.extend(p.screw.position);
  for (const auto& c : p.contacts) {
    box.extend(c);
  }
  return std::max(1.0, box.diagonal().norm());
}

} // namespace

void EquilibriumProblem::validate() const {
  if (contacts.size() < 2 || contacts.size() > 3) {
    throw Error(ErrorCode::InvalidArgument, "equilibrium needs 2 or 3 contacts, got " + std::to_string(contacts.size()));
  }
  if (normals.size() != contacts.size()) {
    throw Error(ErrorCode::InvalidArgument, "one normal per contact required");
  }
  for (const auto& n : normals) {
    if (std::abs(n.norm() - 1.0) > 1e-9 || !(n.z() > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "contact normals must be unit vectors with positive z");
    }
  }
  if (!(body.mass >= 0.0) || !(body.gravity >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "mass and gravity must be non-negative");
  }
  if (!(screw.press_force >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "press force must be non-negative");
  }
  if (std::abs(screw.axis.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "screw axis must be a unit vector");
  }
}

EquilibriumProblem make_problem(const SupportSet& supports,
                                const BodyProperties& body,
                                const ScrewSpec& screw,
                                const StaticsOptions& options) {
  EquilibriumProblem problem;
  problem.contacts = supports.contacts;
  problem.normals = options.vertical_normals ? std::vector<Vec3>(supports.contacts.size(), Vec3::UnitZ())
                                             : supports.normals;
  problem.body = body;
  problem.screw = screw;
  problem.ignore_press_moment = options.ignore_press_moment;
  return problem;
}

LinearSystem assemble_system(const EquilibriumProblem& problem) {
  problem.validate();
  const auto n = static_cast<Eigen::Index>(problem.contacts.size());
  LinearSystem sys;
  sys.A.resize(6, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vec3& normal = problem.normals[j];
    const Vec3 arm = (problem.contacts[j] - problem.body.com) * kMmToM;
    sys.A.col(j).head<3>() = normal;
    sys.A.col(j).tail<3>() = arm.cross(normal);
  }

  const double weight = problem.body.mass * problem.body.gravity;
  const Vec3 press = problem.screw.press_force * problem.screw.axis;
  sys.b.head<3>() = Vec3(0.0, 0.0, -weight) + press;
  if (problem.ignore_press_moment) {
    sys.b.tail<3>().setZero();
  } else {
    const Vec3 arm = (problem.screw.position - problem.body.com) * kMmToM;
    sys.b.tail<3>() = arm.cross(press);
  }
  sys.load_scale = weight + problem.screw.press_force;
  sys.characteristic_length =
      problem.body.characteristic_length > 0.0 ? problem.body.characteristic_length : scene_length(problem);

  Eigen::Matrix<double, 6, Eigen::Dynamic> weighted = sys.A;
  weighted.bottomRows<3>() *= kMomentRowScale;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(weighted);
  const auto& sigma = svd.singularValues();
  if (sigma(sigma.size() - 1) <= kRankTolerance * sigma(0)) {
    throw Error(ErrorCode::DegenerateGeometry, "contact geometry is rank-deficient (collinear or coincident contacts)");
  }
  return sys;
}

double EquilibriumResult::min_force() const {
  return forces.empty() ? 0.0 : *std::min_element(forces.begin(), forces.end());
}

double EquilibriumResult::suction_demand() const {
  return std::max(0.0, -min_force());
}

EquilibriumResult solve_equilibrium(const LinearSystem& system, const SuctionLimits& limits) {
  Eigen::Matrix<double, 6, Eigen::Dynamic> weighted = system.A;
  weighted.bottomRows<3>() *= kMomentRowScale;
  Eigen::Matrix<double, 6, 1> rhs = -system.b;
  rhs.tail<3>() *= kMomentRowScale;

  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(weighted);
  const Eigen::VectorXd forces = cod.solve(Eigen::VectorXd(rhs));

  // Residual in N: moments converted to N*mm then divided by the scene length.
  Eigen::Matrix<double, 6, 1> mismatch = system.A * forces + system.b;
  mismatch.tail<3>() *= 1000.0 / system.characteristic_length;

  EquilibriumResult result;
  result.forces.assign(forces.data(), forces.data() + forces.size());
  result.residual = mismatch.norm();
  result.tolerance = kResidualRelativeTolerance * std::max(system.load_scale, 1e-12);
  const auto min_it = std::min_element(result.forces.begin(), result.forces.end());
  result.limiting_contact = static_cast<std::size_t>(min_it - result.forces.begin());
  result.feasible = check_suction_feasibility(result, limits);
  return result;
}

bool check_suction_feasibility(const EquilibriumResult& result, const SuctionLimits& limits) {
  if (!(result.residual <= result.tolerance)) {
    return false;
  }
  return std::all_of(result.forces.begin(), result.forces.end(), [&](double f) { return f >= -limits.f_max; });
}

void SweepRange::validate() const {
  if (!(step > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "sweep step must be positive");
  }
  if (!(start >= 0.0) || !(end >= start)) {
    throw Error(ErrorCode::InvalidConfig, "sweep range must satisfy 0 <= start <= end");
  }
}

std::vector<double> SweepRange::levels() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

double SweepResult::worst_suction_demand() const {
  double worst = 0.0;
  for (const auto& r : results) {
    worst = std::max(worst, r.suction_demand());
  }
  return worst;
}

SweepResult sweep_press_force(const EquilibriumProblem& problem_template,
                              const SweepRange& range,
                              const SuctionLimits& limits) {
  SweepResult sweep;
  sweep.press_levels = range.levels();
  EquilibriumProblem problem = problem_template;
  for (const double level : sweep.press_levels) {
    problem.screw.press_force = level;
    auto result = solve_equilibrium(assemble_system(problem), limits);
    if (!result.feasible && !sweep.critical_press) {
      sweep.critical_press = level;
    }
    if (result.min_force() < -limits.f_max && !sweep.suction_limit_press) {
      sweep.suction_limit_press = level;
    }
    sweep.results.push_back(std::move(result));
  }
  return sweep;
}

namespace {

ForceTableCell table_cell(const SupportSet& supports,
                          const ScrewSpec& screw,
                          double press,
                          const BodyProperties& body,
                          const StaticsOptions& options,
                          const SuctionLimits& limits) {
  ScrewSpec loaded = screw;
  loaded.press_force = press;
  const auto result = solve_equilibrium(assemble_system(make_problem(supports, body, loaded, options)), limits);
  ForceTableCell cell;
  cell.config_id = supports.id;
  cell.forces = result.forces;
  for (const double f : result.forces) {
    cell.suction.push_back(f < 0.0);
  }
  cell.residual = result.residual;
  cell.feasible = result.feasible;
  return cell;
}

} // namespace

ForceTable screw_force_table(const std::optional<SupportSet>& two_point,
                             const std::optional<SupportSet>& three_point,
                             const std::vector<ScrewSpec>& screws,
                             double press,
                             const BodyProperties& body,
                             const StaticsOptions& options,
                             const SuctionLimits& limits) {
  if (!(press >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "press force must be non-negative");
  }
  ForceTable table;
  table.press = press;
  for (const auto& screw : screws) {
    ForceTableRow row;
    row.screw_id = screw.id;
    if (two_point) {
      row.two_point = table_cell(*two_point, screw, press, body, options, limits);
    }
    if (three_point) {
      row.three_point = table_cell(*three_point, screw, press, body, options, limits);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace vacufix

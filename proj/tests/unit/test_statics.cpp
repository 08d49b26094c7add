#include "doctest.h"

#include "oracles.hpp"
#include "vacufix/error.hpp"
#include "vacufix/statics.hpp"

#include <random>

using namespace vacufix;

namespace {

constexpr double kTight = 1e-9;

SupportSet tripod(const Vec3& center, double radius, double phase = 0.0) {
  SupportSet s;
  s.id = "3P-test";
  for (int k = 0; k < 3; ++k) {
    const double a = phase + 2.0 * EIGEN_PI * k / 3.0;
    s.contacts.push_back(center + radius * Vec3(std::cos(a), std::sin(a), 0.0));
    s.normals.push_back(Vec3::UnitZ());
  }
  return s;
}

BodyProperties body_at(const Vec3& com, double mass = 1.0) {
  BodyProperties b;
  b.com = com;
  b.mass = mass;
  return b;
}

ScrewSpec screw_at(const Vec3& p, double press = 0.0, std::string id = "s0") {
  ScrewSpec s;
  s.id = std::move(id);
  s.position = p;
  s.press_force = press;
  return s;
}

EquilibriumResult solve(const SupportSet& s, const BodyProperties& b, const ScrewSpec& screw,
                        const StaticsOptions& opt = {}) {
  return solve_equilibrium(assemble_system(make_problem(s, b, screw, opt)));
}

// Closed form for vertical normals, press along -Z, arms in mm about the COM.
std::array<double, 3> closed_form(const SupportSet& s, const BodyProperties& b, const ScrewSpec& screw) {
  std::array<Vec2, 3> arms;
  for (int j = 0; j < 3; ++j) {
    arms[j] = planar(s.contacts[j] - b.com);
  }
  const Vec2 screw_arm = planar(screw.position - b.com);
  const double p = screw.press_force;
  return oracle::tripod_closed_form(arms, b.mass * b.gravity + p, p * screw_arm.y(), p * screw_arm.x());
}

} // namespace

TEST_CASE("load vector for gravity only") {
  const auto sys = assemble_system(make_problem(tripod(Vec3::Zero(), 50), body_at(Vec3(0, 0, 20)),
                                                screw_at(Vec3(0, 0, 40))));
  Eigen::Matrix<double, 6, 1> expected;
  expected << 0, 0, -9.81, 0, 0, 0;
  CHECK((sys.b - expected).norm() < kTight);
  CHECK(sys.load_scale == doctest::Approx(9.81));
}

TEST_CASE("press moment about the COM") {
  const Vec3 com(10, 20, 30);
  SUBCASE("press through the COM adds no moment") {
    const auto sys = assemble_system(make_problem(tripod(Vec3(10, 20, 0), 50), body_at(com),
                                                  screw_at(com + Vec3(0, 0, 25), 10.0)));
    CHECK(sys.b.tail<3>().norm() < kTight);
    CHECK(sys.b(2) == doctest::Approx(-19.81));
  }
  SUBCASE("100 mm x offset gives 1 N*m about y") {
    const auto sys = assemble_system(make_problem(tripod(Vec3(10, 20, 0), 50), body_at(com),
                                                  screw_at(com + Vec3(100, 0, 0), 10.0)));
    CHECK(sys.b(3) == doctest::Approx(0.0));
    CHECK(sys.b(4) == doctest::Approx(1.0));
    CHECK(sys.b(5) == doctest::Approx(0.0));
  }
  SUBCASE("ignore_press_moment drops the moment") {
    StaticsOptions opt;
    opt.ignore_press_moment = true;
    const auto sys = assemble_system(make_problem(tripod(Vec3(10, 20, 0), 50), body_at(com),
                                                  screw_at(com + Vec3(100, 0, 0), 10.0), opt));
    CHECK(sys.b.tail<3>().norm() == 0.0);
  }
}

TEST_CASE("system matrix columns stack normal and moment arm") {
  const SupportSet s = tripod(Vec3::Zero(), 50);
  const auto sys = assemble_system(make_problem(s, body_at(Vec3(0, 0, 10)), screw_at(Vec3::Zero())));
  for (int j = 0; j < 3; ++j) {
    const Vec3 arm = (s.contacts[j] - Vec3(0, 0, 10)) * 1e-3;
    CHECK((sys.A.col(j).head<3>() - Vec3::UnitZ()).norm() == 0.0);
    CHECK((sys.A.col(j).tail<3>() - arm.cross(Vec3::UnitZ())).norm() < kTight);
  }
}

TEST_CASE("symmetric tripod") {
  const Vec3 com(0, 0, 20);
  const SupportSet s = tripod(Vec3::Zero(), 60);
  const auto rest = solve(s, body_at(com), screw_at(Vec3(0, 0, 40)));
  const auto pressed = solve(s, body_at(com), screw_at(Vec3(0, 0, 40), 6.0));
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(rest.forces[j] - 3.27) < kTight);
    CHECK(std::abs(pressed.forces[j] - 5.27) < kTight);
  }
  CHECK(rest.feasible);
  CHECK(pressed.feasible);
  CHECK(rest.suction_demand() == 0.0);
}

TEST_CASE("press outside the triangle matches the closed form") {
  const Vec3 com(0, 0, 20);
  const SupportSet s = tripod(Vec3::Zero(), 40);
  const ScrewSpec screw = screw_at(Vec3(-120, 10, 30), 12.0);
  const auto r = solve(s, body_at(com), screw);
  const auto expected = closed_form(s, body_at(com), screw);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(r.forces[j] - expected[j]) < kTight);
  }
  CHECK(r.min_force() < 0.0);
  CHECK(r.forces[r.limiting_contact] == r.min_force());
}

TEST_CASE("suction feasibility on reference force triples") {
  auto result_of = [](std::vector<double> f) {
    EquilibriumResult r;
    r.forces = std::move(f);
    r.residual = 0.0;
    r.tolerance = 1e-6;
    return r;
  };
  CHECK(check_suction_feasibility(result_of({2.37, 21.12, 6.21}), SuctionLimits{}));
  CHECK_FALSE(check_suction_feasibility(result_of({14.29, 12.26, -6.33}), SuctionLimits{}));
  CHECK(check_suction_feasibility(result_of({1.0, 2.0, 3.0}), SuctionLimits{}));
  CHECK(check_suction_feasibility(result_of({1.0, -5.7, 3.0}), SuctionLimits{}));
  auto bad = result_of({1.0, 2.0});
  bad.residual = 1.0;
  CHECK_FALSE(check_suction_feasibility(bad, SuctionLimits{}));
}

TEST_CASE("two contacts cannot balance a COM off their baseline") {
  SupportSet pair;
  pair.contacts = {Vec3(-50, 5, 0), Vec3(50, 5, 0)};
  pair.normals = {Vec3::UnitZ(), Vec3::UnitZ()};
  const auto off = solve(pair, body_at(Vec3(0, 0, 20)), screw_at(Vec3(0, 0, 40)));
  CHECK(off.residual > off.tolerance);
  CHECK_FALSE(off.feasible);

  pair.contacts = {Vec3(-50, 0, 0), Vec3(50, 0, 0)};
  const auto on = solve(pair, body_at(Vec3(0, 0, 20)), screw_at(Vec3(20, 0, 40), 4.0));
  CHECK(on.residual <= on.tolerance);
  CHECK(on.feasible);
  CHECK(on.forces[0] + on.forces[1] == doctest::Approx(13.81));
}

TEST_CASE("screw far off a two-point baseline produces a large least-squares force") {
  SupportSet pair;
  pair.contacts = {Vec3(-60, 2, 0), Vec3(60, 2, 0)};
  pair.normals = {Vec3::UnitZ(), Vec3::UnitZ()};
  const BodyProperties body = body_at(Vec3(0, 0, 25));
  const ScrewSpec screw = screw_at(Vec3(10, 90, 40), 10.0);
  const auto two = solve(pair, body, screw);
  const auto three = solve(tripod(Vec3(0, 0, 0), 150, 0.3), body, screw);
  double two_max = 0.0;
  double three_max = 0.0;
  for (const double f : two.forces) {
    two_max = std::max(two_max, std::abs(f));
  }
  for (const double f : three.forces) {
    three_max = std::max(three_max, std::abs(f));
  }
  CHECK(two_max > 10.0 * three_max);
}

TEST_CASE("screw inside the triangle keeps every force within the total load") {
  const Vec3 com(5, -3, 20);
  const SupportSet s = tripod(Vec3::Zero(), 60, 0.4);
  const auto r = solve(s, body_at(com), screw_at(Vec3(-10, 12, 35), 18.0));
  for (const double f : r.forces) {
    CHECK(f >= 0.0);
    CHECK(f <= 9.81 + 18.0);
  }
}

TEST_CASE("degenerate contact layouts are rejected") {
  SupportSet line;
  line.contacts = {Vec3(0, 0, 0), Vec3(50, 0, 0), Vec3(100, 0, 0)};
  line.normals.assign(3, Vec3::UnitZ());
  try {
    assemble_system(make_problem(line, body_at(Vec3(50, 0, 20)), screw_at(Vec3::Zero())));
    FAIL("expected DegenerateGeometry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateGeometry);
  }
  SupportSet same;
  same.contacts = {Vec3(10, 10, 0), Vec3(10, 10, 0)};
  same.normals.assign(2, Vec3::UnitZ());
  CHECK_THROWS_AS(assemble_system(make_problem(same, body_at(Vec3(0, 0, 20)), screw_at(Vec3::Zero()))), Error);
}

TEST_CASE("problem validation") {
  SupportSet one;
  one.contacts = {Vec3::Zero()};
  one.normals = {Vec3::UnitZ()};
  CHECK_THROWS_AS(assemble_system(make_problem(one, body_at(Vec3::Zero()), screw_at(Vec3::Zero()))), Error);
  SupportSet s = tripod(Vec3::Zero(), 50);
  s.normals[1] = -Vec3::UnitZ();
  CHECK_THROWS_AS(assemble_system(make_problem(s, body_at(Vec3::Zero()), screw_at(Vec3::Zero()))), Error);
  CHECK_THROWS_AS(
      assemble_system(make_problem(tripod(Vec3::Zero(), 50), body_at(Vec3::Zero()), screw_at(Vec3::Zero(), -1.0))),
      Error);
}

TEST_CASE("sweep on a stable tripod never fails") {
  const auto problem = make_problem(tripod(Vec3::Zero(), 60), body_at(Vec3(0, 0, 20)), screw_at(Vec3(5, 5, 40)));
  const auto sweep = sweep_press_force(problem, SweepRange{});
  CHECK(sweep.press_levels.size() == 37);
  CHECK(sweep.press_levels.back() == 18.0);
  CHECK(sweep.feasible_throughout());
  CHECK_FALSE(sweep.suction_limit_press.has_value());
  for (std::size_t i = 1; i < sweep.press_levels.size(); ++i) {
    CHECK(sweep.press_levels[i] > sweep.press_levels[i - 1]);
  }
}

TEST_CASE("critical press lands within one step of the analytic crossing") {
  const BodyProperties body = body_at(Vec3(0, 0, 20));
  const SupportSet s = tripod(Vec3::Zero(), 40);
  ScrewSpec screw = screw_at(Vec3(-110, 15, 30));
  // Forces are affine in the press force: f(P) = f0 + P * g.
  const auto f0 = closed_form(s, body, screw);
  screw.press_force = 1.0;
  const auto f1 = closed_form(s, body, screw);
  double analytic = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 3; ++j) {
    const double slope = f1[j] - f0[j];
    if (slope < 0) {
      analytic = std::min(analytic, (-5.7 - f0[j]) / slope);
    }
  }
  REQUIRE(analytic > 0.0);
  REQUIRE(analytic < 18.0);
  screw.press_force = 0.0;
  const auto sweep = sweep_press_force(make_problem(s, body, screw), SweepRange{});
  REQUIRE(sweep.critical_press.has_value());
  CHECK(*sweep.critical_press >= analytic);
  CHECK(*sweep.critical_press < analytic + 0.5);
  CHECK(sweep.suction_limit_press == sweep.critical_press);
}

TEST_CASE("sweep range validation") {
  CHECK_THROWS_AS(SweepRange({0, 18, 0}).validate(), Error);
  CHECK_THROWS_AS(SweepRange({5, 1, 0.5}).validate(), Error);
  CHECK(SweepRange({0, 1, 0.25}).levels().size() == 5);
}

TEST_CASE("force table") {
  const BodyProperties body = body_at(Vec3(0, 0, 20));
  SupportSet pair;
  pair.id = "2P-test";
  pair.contacts = {Vec3(-50, 0, 0), Vec3(50, 0, 0)};
  pair.normals.assign(2, Vec3::UnitZ());
  const auto table = screw_force_table(pair, tripod(Vec3::Zero(), 60), {screw_at(Vec3(0, 0, 40), 0, "center")},
                                       6.0, body);
  REQUIRE(table.rows.size() == 1);
  const auto& row = table.rows[0];
  REQUIRE(row.three_point.has_value());
  REQUIRE(row.two_point.has_value());
  for (const double f : row.three_point->forces) {
    CHECK(std::abs(f - 5.27) < kTight);
  }
  CHECK(row.two_point->forces.size() == 2);
  CHECK(row.three_point->config_id == "3P-test");
  CHECK_THROWS_AS(screw_force_table(pair, std::nullopt, {}, -1.0, body), Error);
}

TEST_CASE("property: least squares equals the closed-form tripod solve") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  while (tested < 200) {
    SupportSet s;
    for (int j = 0; j < 3; ++j) {
      s.contacts.emplace_back(150 * u(rng), 150 * u(rng), 10 * u(rng));
      s.normals.push_back(Vec3::UnitZ());
    }
    const Vec2 a = planar(s.contacts[0]), b = planar(s.contacts[1]), c = planar(s.contacts[2]);
    if (std::abs(cross2(a, b, c)) < 0.1 * (b - a).norm() * (c - a).norm()) {
      continue;
    }
    const BodyProperties body = body_at(Vec3(50 * u(rng), 50 * u(rng), 40 + 10 * u(rng)), 0.5 + std::abs(u(rng)));
    const ScrewSpec screw = screw_at(Vec3(200 * u(rng), 200 * u(rng), 60), 18.0 * std::abs(u(rng)));
    const auto r = solve(s, body, screw);
    const auto expected = closed_form(s, body, screw);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(r.forces[j] - expected[j]) < kTight);
    }
    const double total = r.forces[0] + r.forces[1] + r.forces[2];
    CHECK(std::abs(total - (body.mass * body.gravity + screw.press_force)) < kTight);
    CHECK(r.residual < 1e-9);
    ++tested;
  }
}

TEST_CASE("property: forces are affine in the press force") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const SupportSet s = tripod(Vec3(20 * u(rng), 20 * u(rng), 0), 50 + 20 * u(rng), u(rng));
    const BodyProperties body = body_at(Vec3(10 * u(rng), 10 * u(rng), 30));
    const Vec3 at(150 * u(rng), 150 * u(rng), 50);
    const auto f0 = solve(s, body, screw_at(at, 0.0)).forces;
    const auto f9 = solve(s, body, screw_at(at, 9.0)).forces;
    const auto f18 = solve(s, body, screw_at(at, 18.0)).forces;
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(f9[j] - 0.5 * (f0[j] + f18[j])) < kTight);
    }
  }
}

TEST_CASE("property: translating or yawing the whole scene leaves forces unchanged") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    SupportSet s = tripod(Vec3(0, 0, 0), 60, u(rng));
    BodyProperties body = body_at(Vec3(15 * u(rng), 15 * u(rng), 25));
    body.characteristic_length = 300.0;
    ScrewSpec screw = screw_at(Vec3(120 * u(rng), 120 * u(rng), 45), 10.0);
    const auto base = solve(s, body, screw);

    const Eigen::AngleAxisd yaw(EIGEN_PI * u(rng), Vec3::UnitZ());
    const Vec3 shift(500 * u(rng), 500 * u(rng), 100 * u(rng));
    for (auto& c : s.contacts) {
      c = yaw * c + shift;
    }
    body.com = yaw * body.com + shift;
    screw.position = yaw * screw.position + shift;
    const auto moved = solve(s, body, screw);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(base.forces[j] - moved.forces[j]) < kTight);
    }
    CHECK(base.feasible == moved.feasible);
  }
}

TEST_CASE("property: doubling the mass doubles every force without press") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const SupportSet s = tripod(Vec3::Zero(), 60, u(rng));
    const Vec3 com(20 * u(rng), 20 * u(rng), 30);
    const auto one = solve(s, body_at(com, 1.3), screw_at(Vec3(40, 0, 40)));
    const auto two = solve(s, body_at(com, 2.6), screw_at(Vec3(40, 0, 40)));
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(two.forces[j] - 2.0 * one.forces[j]) < kTight);
    }
  }
}

TEST_CASE("property: COM inside the contact triangle gives positive forces at rest") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const SupportSet s = tripod(Vec3::Zero(), 40 + 60 * u(rng), 6.28 * u(rng));
    double w0 = u(rng) + 0.01, w1 = u(rng) + 0.01, w2 = u(rng) + 0.01;
    const double sum = w0 + w1 + w2;
    const Vec3 com = (w0 * s.contacts[0] + w1 * s.contacts[1] + w2 * s.contacts[2]) / sum + Vec3(0, 0, 30);
    const auto r = solve(s, body_at(com), screw_at(Vec3::Zero()));
    for (const double f : r.forces) {
      CHECK(f > 0.0);
    }
  }
}

TEST_CASE("non-vertical normals still satisfy the balance") {
  SupportSet s = tripod(Vec3::Zero(), 60);
  s.normals[0] = Vec3(0.2, 0.0, 1.0).normalized();
  s.normals[1] = Vec3(-0.1, 0.15, 1.0).normalized();
  const auto sys = assemble_system(make_problem(s, body_at(Vec3(0, 0, 20)), screw_at(Vec3(0, 0, 40), 3.0)));
  const auto r = solve_equilibrium(sys);
  CHECK(r.forces.size() == 3);
  StaticsOptions vertical;
  vertical.vertical_normals = true;
  const auto v = solve(s, body_at(Vec3(0, 0, 20)), screw_at(Vec3(0, 0, 40), 3.0), vertical);
  for (const double f : v.forces) {
    CHECK(std::abs(f - (9.81 + 3.0) / 3.0) < kTight);
  }
}

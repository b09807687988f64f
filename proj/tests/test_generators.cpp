#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ktraj/generators.hpp"

using namespace ktraj;

namespace {
HardwareSpec paper_spec(int n = 64) {
  HardwareSpec s;
  s.n = n;
  return s;
}
}  // namespace

TEST_CASE("spiral under the reference hardware limits") {
  const HardwareSpec spec = paper_spec();
  const auto result = spiral(spec, 1, 3000);
  CHECK(result.coverage_complete);
  const auto rep = feasibility_report(result.traj, spec, 1e-6);
  CHECK(rep.feasible);

  SUBCASE("radius is monotone for a plain archimedean spiral") {
    const auto mono = spiral(spec, 1, 3000, {1.0, 1.0});
    double prev = -1.0;
    bool monotone = true;
    for (int i = 0; i < mono.traj.samples_per_shot(); ++i) {
      const double r = mono.traj.at(0, i).norm();
      if (r < prev - 1e-9) monotone = false;
      prev = std::max(prev, r);
    }
    CHECK(monotone);
    CHECK(mono.traj.at(0, 0).norm() < 0.5);
    if (mono.coverage_complete) {
      CHECK(mono.traj.at(0, mono.traj.samples_per_shot() - 1).norm() ==
            doctest::Approx(32.0).epsilon(1e-3));
    }
  }

  SUBCASE("two shots are rotations by pi") {
    const auto two = spiral(spec, 2, 400);
    for (int i = 0; i < 400; ++i) {
      CHECK(two.traj.at(1, i).x == doctest::Approx(-two.traj.at(0, i).x).epsilon(1e-9));
      CHECK(two.traj.at(1, i).y == doctest::Approx(-two.traj.at(0, i).y).epsilon(1e-9));
    }
  }

  SUBCASE("determinism") {
    const auto again = spiral(spec, 1, 3000);
    for (size_t i = 0; i < again.traj.points().size(); ++i) {
      CHECK(again.traj.points()[i].x == result.traj.points()[i].x);
      CHECK(again.traj.points()[i].y == result.traj.points()[i].y);
    }
  }
}

TEST_CASE("radial") {
  const HardwareSpec spec = paper_spec();

  SUBCASE("angles 0 and 90 degrees for two shots") {
    const auto two = radial(spec, 2, 301);
    for (int i = 0; i < 301; ++i) CHECK(std::abs(two.traj.at(0, i).y) < 1e-9);
    for (int i = 0; i < 301; ++i) CHECK(std::abs(two.traj.at(1, i).x) < 1e-9);
  }

  SUBCASE("all samples inside the grid and midpoint at the origin") {
    const auto r = radial(spec, 5, 301);
    for (const Vec2& p : r.traj.points()) CHECK(p.norm() <= 32.0 + 1e-9);
    for (int s = 0; s < 5; ++s) {
      const Vec2 mid = 0.5 * (r.traj.at(s, 0) + r.traj.at(s, 300));
      CHECK(mid.norm() < 1e-9);
    }
  }

  SUBCASE("feasible under the reference limits") {
    const auto r = radial(spec, 4, 3000);
    CHECK(r.coverage_complete);
    CHECK(feasibility_report(r.traj, spec, 1e-6).feasible);
  }
}

TEST_CASE("cartesian") {
  const HardwareSpec spec = paper_spec();
  const auto c = cartesian(spec, 4, 3000);

  SUBCASE("ky lines are equispaced over the grid") {
    CHECK(c.traj.at(0, 0).y == doctest::Approx(-32.0));
    CHECK(c.traj.at(3, 0).y == doctest::Approx(32.0));
    const double gap0 = c.traj.at(1, 0).y - c.traj.at(0, 0).y;
    const double gap1 = c.traj.at(2, 0).y - c.traj.at(1, 0).y;
    CHECK(gap0 == doctest::Approx(gap1).epsilon(1e-12));
  }

  SUBCASE("constant ky within each shot, traversed left to right") {
    for (int s = 0; s < 4; ++s) {
      for (int i = 0; i < c.traj.samples_per_shot(); ++i) {
        CHECK(c.traj.at(s, i).y == c.traj.at(s, 0).y);
      }
      CHECK(c.traj.at(s, 0).x == doctest::Approx(-32.0));
      CHECK(c.traj.at(s, c.traj.samples_per_shot() - 1).x == doctest::Approx(32.0));
    }
  }

  SUBCASE("feasible under the reference limits") {
    CHECK(c.coverage_complete);
    CHECK(feasibility_report(c.traj, spec, 1e-6).feasible);
  }
}

TEST_CASE("coverage-incomplete flag when m is too small") {
  // 20 samples cannot cross the 64-unit grid at ~3.4 units/sample with the
  // acceleration budget.
  const HardwareSpec spec = paper_spec();
  const auto r = radial(spec, 1, 12);
  CHECK_FALSE(r.coverage_complete);
  CHECK(feasibility_report(r.traj, spec, 1e-6).feasible);
}

TEST_CASE("gaussian cloud") {
  SUBCASE("sample standard deviation close to n/6") {
    const Trajectory cloud = gaussian_init(320, 3000, 42);
    double mean = 0.0;
    for (const Vec2& p : cloud.points()) mean += p.x;
    mean /= cloud.points().size();
    double var = 0.0;
    for (const Vec2& p : cloud.points()) var += (p.x - mean) * (p.x - mean);
    var /= (cloud.points().size() - 1);
    const double sd = std::sqrt(var);
    CHECK(sd > 320.0 / 6.0 * 0.93);
    CHECK(sd < 320.0 / 6.0 * 1.07);
  }

  SUBCASE("deterministic per seed") {
    const Trajectory a = gaussian_init(64, 100, 7);
    const Trajectory b = gaussian_init(64, 100, 7);
    const Trajectory c = gaussian_init(64, 100, 8);
    CHECK(a.points()[0].x == b.points()[0].x);
    CHECK(a.points()[0].x != c.points()[0].x);
  }

  SUBCASE("clamped to the grid") {
    const Trajectory cloud = gaussian_init(320, 3000, 1);
    for (const Vec2& p : cloud.points()) {
      CHECK(std::abs(p.x) <= 160.0);
      CHECK(std::abs(p.y) <= 160.0);
    }
  }
}

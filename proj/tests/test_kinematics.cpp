#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ktraj/generators.hpp"
#include "ktraj/rng.hpp"
#include "ktraj/trajectory.hpp"

using namespace ktraj;

namespace {

Trajectory make_traj(std::vector<Vec2> pts, int n = 64, double dt = 1e-5) {
  const int m = static_cast<int>(pts.size());
  return Trajectory(1, m, std::move(pts), dt, n);
}

HardwareSpec paper_spec(int n = 64) {
  HardwareSpec s;
  s.n = n;
  return s;  // 40 mT/m, 200 T/m/s, 10 us defaults
}

Trajectory random_traj(uint64_t seed, int shots = 2, int m = 12, int n = 64) {
  Rng rng(seed);
  std::vector<Vec2> pts(static_cast<size_t>(shots) * m);
  for (auto& p : pts) p = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
  return Trajectory(shots, m, std::move(pts), 1e-5, n);
}

}  // namespace

TEST_CASE("hardware spec grid bounds") {
  const HardwareSpec s = paper_spec();
  CHECK(s.v_max_grid() == doctest::Approx(3.40608).epsilon(1e-9));
  CHECK(s.a_max_grid() == doctest::Approx(0.170304).epsilon(1e-9));
  HardwareSpec bad = s;
  bad.fov = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trajectory construction clamps and validates") {
  Trajectory t = make_traj({{100.0, -100.0}, {0.0, 0.0}});
  CHECK(t.at(0, 0).x == 32.0);
  CHECK(t.at(0, 0).y == -32.0);
  CHECK_THROWS_AS(make_traj({{0.0, std::nan("")}, {0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Trajectory(1, 0, {}, 1e-5, 64), std::invalid_argument);
  CHECK_THROWS_AS(Trajectory(0, 2, {}, 1e-5, 64), std::invalid_argument);
}

TEST_CASE("velocities") {
  SUBCASE("straight line with constant spacing") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({3.0 * i, 4.0 * i});
    const auto v = velocities(make_traj(pts));
    for (const Vec2& d : v[0]) {
      CHECK(d.x == doctest::Approx(3.0));
      CHECK(d.y == doctest::Approx(4.0));
      CHECK(d.norm() == doctest::Approx(5.0));
    }
  }
  SUBCASE("identical points give zero") {
    const auto v = velocities(make_traj({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}));
    for (const Vec2& d : v[0]) CHECK(d.norm() == 0.0);
  }
  SUBCASE("hand finite differences") {
    const auto v = velocities(make_traj({{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}}));
    REQUIRE(v[0].size() == 2);
    CHECK(v[0][0].x == doctest::Approx(1.0));
    CHECK(v[0][1].x == doctest::Approx(2.0));
  }
  SUBCASE("shot too short") {
    CHECK_THROWS_WITH_AS(velocities(make_traj({{0.0, 0.0}})), "velocities: shot too short",
                         std::invalid_argument);
  }
  SUBCASE("no cross-shot differences") {
    Trajectory t(2, 2, {{0, 0}, {1, 0}, {10, 10}, {11, 10}}, 1e-5, 64);
    const auto v = velocities(t);
    CHECK(v.size() == 2);
    CHECK(v[0].size() == 1);
    CHECK(v[1].size() == 1);
  }
}

TEST_CASE("accelerations") {
  SUBCASE("uniform line is zero") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 8; ++i) pts.push_back({2.0 * i, -1.0 * i});
    for (const auto& shot : accelerations(make_traj(pts))) {
      for (const Vec2& a : shot) CHECK(a.norm() == doctest::Approx(0.0));
    }
  }
  SUBCASE("hand arithmetic") {
    const auto a = accelerations(make_traj({{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}}));
    REQUIRE(a[0].size() == 1);
    CHECK(a[0][0].x == doctest::Approx(1.0));
    CHECK(a[0][0].y == doctest::Approx(0.0));
  }
  SUBCASE("parabola has constant second difference") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 7; ++i) pts.push_back({static_cast<double>(i) * i, 0.0});
    for (const auto& shot : accelerations(make_traj(pts, 128))) {
      for (const Vec2& a : shot) {
        CHECK(a.x == doctest::Approx(2.0));
        CHECK(a.y == doctest::Approx(0.0));
      }
    }
  }
  SUBCASE("m < 3 errors") {
    CHECK_THROWS_AS(accelerations(make_traj({{0.0, 0.0}, {1.0, 0.0}})), std::invalid_argument);
  }
}

TEST_CASE("constraint penalty") {
  const HardwareSpec spec = paper_spec();

  SUBCASE("feasible trajectory has zero penalty and gradient") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({0.1 * i, 0.0});
    const auto res = constraint_penalty(make_traj(pts), spec, 0.1, 0.1);
    CHECK(res.value == 0.0);
    for (const Vec2& g : res.grad) CHECK(g.norm() == 0.0);
  }

  SUBCASE("single violating velocity") {
    const double v = spec.v_max_grid() + 1.0;
    const auto res = constraint_penalty(make_traj({{0.0, 0.0}, {v, 0.0}}), spec, 0.1, 0.1);
    CHECK(res.value == doctest::Approx(0.1).epsilon(1e-12));
  }

  SUBCASE("gradient matches central finite differences") {
    // Scaled-down limits make both hinges active on a small random cloud.
    HardwareSpec tight = spec;
    tight.g_max = 2.0;
    tight.s_max = 20.0;
    Trajectory traj = random_traj(7);
    const double lv = 0.37, la = 0.91;
    const double h = 1e-4;
    const auto res = constraint_penalty(traj, tight, lv, la);

    Rng rng(99);
    int checked = 0;
    while (checked < 50) {
      const int idx = rng.uniform_int(0, static_cast<int>(traj.points().size()) - 1);
      const bool is_x = rng.uniform() < 0.5;
      auto eval = [&](double delta) {
        Trajectory t = traj;
        (is_x ? t.points()[idx].x : t.points()[idx].y) += delta;
        return constraint_penalty(t, tight, lv, la).value;
      };
      // Keep away from hinge kinks: probe both sides and skip if the active
      // set changes.
      const double fd = (eval(h) - eval(-h)) / (2.0 * h);
      const double an = is_x ? res.grad[idx].x : res.grad[idx].y;
      if (std::abs(fd) < 1e-6 && std::abs(an) < 1e-6) {
        ++checked;
        continue;
      }
      CHECK(std::abs(fd - an) / std::max(1e-12, std::abs(fd)) < 1e-5);
      ++checked;
    }
  }

  SUBCASE("penalty is zero iff report with tolerance 0 is clean") {
    for (uint64_t seed = 0; seed < 8; ++seed) {
      HardwareSpec tight = spec;
      tight.g_max = 20.0;
      Trajectory traj = random_traj(seed, 1, 20);
      const auto pen = constraint_penalty(traj, tight, 0.1, 0.1);
      const auto rep = feasibility_report(traj, tight, 0.0);
      CHECK((pen.value == 0.0) == rep.feasible);
    }
  }

  SUBCASE("translation invariance") {
    Trajectory traj = random_traj(3, 1, 15);
    HardwareSpec tight = spec;
    tight.g_max = 2.0;
    const auto base = constraint_penalty(traj, tight, 0.2, 0.3);
    Trajectory shifted = traj;
    for (Vec2& p : shifted.points()) p += {2.5, -1.5};
    const auto moved = constraint_penalty(shifted, tight, 0.2, 0.3);
    CHECK(moved.value == doctest::Approx(base.value).epsilon(1e-12));
    const auto v0 = velocities(traj);
    const auto v1 = velocities(shifted);
    for (size_t i = 0; i < v0[0].size(); ++i) {
      CHECK(v1[0][i].x == doctest::Approx(v0[0][i].x).epsilon(1e-12));
      CHECK(v1[0][i].y == doctest::Approx(v0[0][i].y).epsilon(1e-12));
    }
  }
}

TEST_CASE("feasibility report") {
  const HardwareSpec spec = paper_spec();

  SUBCASE("generated spiral is feasible") {
    const auto result = spiral(spec, 1, 3000);
    const auto rep = feasibility_report(result.traj, spec, 1e-6);
    CHECK(rep.feasible);
    CHECK(rep.max_velocity_violation <= 1e-6);
    CHECK(rep.max_acceleration_violation <= 1e-6);
  }

  SUBCASE("random cloud violates badly") {
    const Trajectory cloud = gaussian_init(320, 500, 11);
    HardwareSpec s = paper_spec(320);
    const auto rep = feasibility_report(cloud, s, 1e-6);
    CHECK_FALSE(rep.feasible);
    CHECK(rep.max_velocity_violation > 10.0);
    CHECK(rep.violating_sample_count > 0);
  }

  SUBCASE("empty trajectory cannot be constructed") {
    CHECK_THROWS_AS(Trajectory(1, 0, {}, 1e-5, 64), std::invalid_argument);
  }
}

TEST_CASE("waveform conversion") {
  const HardwareSpec spec = paper_spec();

  SUBCASE("velocity at the limit maps to the peak gradient") {
    const double v = spec.v_max_grid();
    const auto wf = to_waveforms(make_traj({{0.0, 0.0}, {v, 0.0}, {2 * v, 0.0}}), spec);
    CHECK(wf.gradient_mT_m[0][0].norm() == doctest::Approx(40.0).epsilon(1e-9));
  }

  SUBCASE("zero velocities give zero gradients") {
    const auto wf = to_waveforms(make_traj({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}), spec);
    for (const Vec2& g : wf.gradient_mT_m[0]) CHECK(g.norm() == 0.0);
    for (const Vec2& s : wf.slew_T_m_s[0]) CHECK(s.norm() == 0.0);
  }

  SUBCASE("unit velocity in grid units") {
    // G = 1/(gamma*dt*fov) = 1/(42.576e6 * 1e-5 * 0.2) T/m ~ 11.744 mT/m.
    const auto wf = to_waveforms(make_traj({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}), spec);
    const double expected = 1.0 / (42.576e6 * 1e-5 * 0.2) * 1e3;
    CHECK(wf.gradient_mT_m[0][0].x == doctest::Approx(expected).epsilon(1e-12));
    CHECK(wf.gradient_mT_m[0][0].x == doctest::Approx(11.7437).epsilon(1e-4));
  }

  SUBCASE("round-trip through the inverse conversion") {
    Trajectory traj = random_traj(21, 2, 9);
    const auto wf = to_waveforms(traj, spec);
    const auto vel = velocities(traj);
    const auto acc = accelerations(traj);
    for (int s = 0; s < traj.shots(); ++s) {
      for (size_t i = 0; i < vel[s].size(); ++i) {
        const double back = wf.gradient_mT_m[s][i].x * 1e-3 * spec.gamma * spec.dt * spec.fov;
        CHECK(back == doctest::Approx(vel[s][i].x).epsilon(1e-12));
      }
      for (size_t i = 0; i < acc[s].size(); ++i) {
        const double back = wf.slew_T_m_s[s][i].y * spec.gamma * spec.dt * spec.dt * spec.fov;
        CHECK(back == doctest::Approx(acc[s][i].y).epsilon(1e-12));
      }
    }
  }
}

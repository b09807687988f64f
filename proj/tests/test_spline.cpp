#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ktraj/rng.hpp"
#include "ktraj/spline.hpp"

using namespace ktraj;

namespace {

std::vector<Vec2> random_points(uint64_t seed, int count, double range = 20.0) {
  Rng rng(seed);
  std::vector<Vec2> pts(count);
  for (auto& p : pts) p = {rng.uniform(-range, range), rng.uniform(-range, range)};
  return pts;
}

}  // namespace

TEST_CASE("two control points interpolate linearly") {
  const auto out = spline_resample({{0.0, 0.0}, {10.0, 0.0}}, 5);
  REQUIRE(out.size() == 5);
  const double expected[] = {0.0, 2.5, 5.0, 7.5, 10.0};
  for (int i = 0; i < 5; ++i) {
    CHECK(out[i].x == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(out[i].y == doctest::Approx(0.0));
  }
}

TEST_CASE("curve passes through every control point") {
  const auto cp = random_points(5, 7);
  SplineCurve curve(cp);
  for (int i = 0; i < 7; ++i) {
    const Vec2 v = curve.eval(static_cast<double>(i));
    CHECK(std::abs(v.x - cp[i].x) < 1e-10);
    CHECK(std::abs(v.y - cp[i].y) < 1e-10);
  }
}

TEST_CASE("collinear control points stay collinear") {
  std::vector<Vec2> cp;
  for (int i = 0; i < 6; ++i) cp.push_back({1.0 * i, 2.0 * i + 1.0});
  for (const Vec2& p : spline_resample(cp, 41)) {
    CHECK(p.y == doctest::Approx(2.0 * p.x + 1.0).epsilon(1e-10));
  }
}

TEST_CASE("resampling is linear in the control points") {
  const auto cp_a = random_points(1, 6);
  const auto cp_b = random_points(2, 6);
  const double a = 0.7, b = -1.3;
  std::vector<Vec2> mixed(6);
  for (int i = 0; i < 6; ++i) mixed[i] = a * cp_a[i] + b * cp_b[i];
  const auto out_mixed = spline_resample(mixed, 33);
  const auto out_a = spline_resample(cp_a, 33);
  const auto out_b = spline_resample(cp_b, 33);
  for (size_t i = 0; i < out_mixed.size(); ++i) {
    CHECK(std::abs(out_mixed[i].x - (a * out_a[i].x + b * out_b[i].x)) < 1e-10);
    CHECK(std::abs(out_mixed[i].y - (a * out_a[i].y + b * out_b[i].y)) < 1e-10);
  }
}

TEST_CASE("fewer than two control points is an error") {
  CHECK_THROWS_AS(spline_resample({{1.0, 1.0}}, 5), std::invalid_argument);
  CHECK_THROWS_AS(SplineCurve({}), std::invalid_argument);
}

TEST_CASE("gradient: straight segment endpoints map one-to-one") {
  // With c = 2 and m = 2 the resampling is the identity.
  std::vector<Vec2> upstream = {{1.0, 0.0}, {0.0, 1.0}};
  const auto grad = spline_resample_grad({{0.0, 0.0}, {10.0, 0.0}}, 2, upstream);
  CHECK(grad[0].x == doctest::Approx(1.0));
  CHECK(grad[0].y == doctest::Approx(0.0));
  CHECK(grad[1].x == doctest::Approx(0.0));
  CHECK(grad[1].y == doctest::Approx(1.0));
}

TEST_CASE("gradient matches finite differences") {
  const int c = 6, m = 40;
  const auto cp = random_points(9, c);
  const auto upstream = random_points(10, m, 1.0);

  auto objective = [&](const std::vector<Vec2>& pts) {
    const auto out = spline_resample(pts, m);
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += upstream[i].x * out[i].x + upstream[i].y * out[i].y;
    return acc;
  };

  const auto grad = spline_resample_grad(cp, m, upstream);
  const double h = 1e-5;
  for (int i = 0; i < c; ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      auto plus = cp, minus = cp;
      (axis == 0 ? plus[i].x : plus[i].y) += h;
      (axis == 0 ? minus[i].x : minus[i].y) -= h;
      const double fd = (objective(plus) - objective(minus)) / (2.0 * h);
      const double an = axis == 0 ? grad[i].x : grad[i].y;
      CHECK(std::abs(fd - an) / std::max(1.0, std::abs(fd)) < 1e-8);
    }
  }
}

TEST_CASE("zero upstream gives zero gradient") {
  const auto grad =
      spline_resample_grad(random_points(3, 5), 17, std::vector<Vec2>(17, Vec2{0.0, 0.0}));
  for (const Vec2& g : grad) CHECK(g.norm() == 0.0);
}

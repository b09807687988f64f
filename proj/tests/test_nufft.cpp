#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ktraj/ndft.hpp"
#include "ktraj/nufft.hpp"
#include "ktraj/rng.hpp"

using namespace ktraj;

namespace {

ComplexImage random_image(int n, uint64_t seed) {
  Rng rng(seed);
  ComplexImage img(n);
  for (cplx& v : img.v) v = {rng.gauss(), rng.gauss()};
  return img;
}

// Random coordinates with fractional parts kept away from cell boundaries so
// finite-difference probes do not cross a kernel cell reassignment.
Trajectory random_traj(int n, int m, uint64_t seed, bool interior_frac = false) {
  Rng rng(seed);
  std::vector<Vec2> pts(m);
  const double os = 1.25;
  for (auto& p : pts) {
    for (int axis = 0; axis < 2; ++axis) {
      double c = rng.uniform(-n / 2.0, n / 2.0);
      if (interior_frac) {
        const double scaled = c * os;
        const double frac = scaled - std::floor(scaled);
        if (frac < 0.1 || frac > 0.9) c = (std::floor(scaled) + 0.5) / os;
      }
      (axis == 0 ? p.x : p.y) = c;
    }
  }
  return Trajectory(1, m, std::move(pts), 1e-5, n);
}

// The reference kernel parameters (oversampling 1.25, width 4) carry an
// inherent aliasing floor near 1e-2 at band-edge frequencies; oracle
// equivalence at 1e-3 is checked with a wider kernel, and the defaults are
// held to their achievable bound.
NufftConfig accurate_cfg() {
  NufftConfig cfg;
  cfg.oversampling = 2.0;
  cfg.kernel_width = 6;
  return cfg;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx acc{0.0, 0.0};
  for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace

TEST_CASE("kaiser-bessel kernel") {
  NufftConfig cfg;
  SUBCASE("default beta follows the standard shape formula") {
    CHECK(cfg.beta() == doctest::Approx(M_PI * std::sqrt(2.4 * 2.4 - 0.8)).epsilon(1e-12));
  }
  SUBCASE("maximum at zero, symmetric, compact support") {
    CHECK(kb_kernel(0.0, cfg) == doctest::Approx(1.0));
    for (double u : {0.3, 0.9, 1.7}) {
      CHECK(kb_kernel(u, cfg) == doctest::Approx(kb_kernel(-u, cfg)));
      CHECK(kb_kernel(u, cfg) < 1.0);
      CHECK(kb_kernel(u, cfg) > 0.0);
    }
    CHECK(kb_kernel(2.1, cfg) == 0.0);
    CHECK(kb_kernel(2.0, cfg) == doctest::Approx(1.0 / std::cyl_bessel_i(0.0, cfg.beta())));
  }
  SUBCASE("derivative matches finite differences") {
    const double h = 1e-6;
    for (double u : {-1.7, -0.9, -0.2, 0.0, 0.4, 1.1, 1.9}) {
      const double fd = (kb_kernel(u + h, cfg) - kb_kernel(u - h, cfg)) / (2.0 * h);
      CHECK(kb_kernel_deriv(u, cfg) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  SUBCASE("config validation") {
    NufftConfig bad = cfg;
    bad.kernel_width = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.oversampling = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("reference transforms") {
  SUBCASE("impulse at the center gives unit samples") {
    ComplexImage img(16);
    img.at(8, 8) = 1.0;  // (u, v) = (0, 0)
    const auto s = ndft_forward(img, random_traj(16, 40, 3));
    for (const cplx& v : s.v) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
  }

  SUBCASE("adjointness inner-product identity") {
    const auto traj = random_traj(16, 30, 4);
    const auto x = random_image(16, 5);
    KSpaceSamples y(1, 30);
    Rng rng(6);
    for (cplx& v : y.v) v = {rng.gauss(), rng.gauss()};
    const auto fx = ndft_forward(x, traj);
    const auto aty = ndft_adjoint(y, traj, 16);
    const cplx lhs = dot(fx.v, y.v);
    const cplx rhs = dot(x.v, aty.v);
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
  }

  SUBCASE("integer cartesian grid matches the FFT") {
    // Full integer grid: the NDFT reduces to a plain DFT; verify against the
    // fast transform's own convention via a hand-rolled DFT on a small image.
    const int n = 8;
    const auto img = random_image(n, 7);
    std::vector<Vec2> pts;
    for (int v = -n / 2; v < n / 2; ++v) {
      for (int u = -n / 2; u < n / 2; ++u) pts.push_back({(double)u, (double)v});
    }
    const Trajectory traj(1, n * n, std::move(pts), 1e-5, n);
    const auto s = ndft_forward(img, traj);
    for (int kv = -n / 2; kv < n / 2; ++kv) {
      for (int ku = -n / 2; ku < n / 2; ++ku) {
        cplx acc{0.0, 0.0};
        for (int v = -n / 2; v < n / 2; ++v) {
          for (int u = -n / 2; u < n / 2; ++u) {
            const double ph = -2.0 * M_PI * (static_cast<double>(ku) * u + kv * v) / n;
            acc += img.at(v + n / 2, u + n / 2) * cplx{std::cos(ph), std::sin(ph)};
          }
        }
        const int idx = (kv + n / 2) * n + (ku + n / 2);
        CHECK(std::abs(s.v[idx] - acc) < 1e-9);
      }
    }
  }
}

TEST_CASE("forward transform") {
  NufftConfig cfg;

  SUBCASE("zero image maps to zero samples") {
    const ComplexImage img(32);
    const auto s = nufft_forward(img, random_traj(32, 100, 8), cfg);
    for (const cplx& v : s.v) CHECK(std::abs(v) == 0.0);
  }

  SUBCASE("unit impulse at the center gives samples near one") {
    ComplexImage img(32);
    img.at(16, 16) = 1.0;
    const auto traj = random_traj(32, 100, 9);
    const auto s = nufft_forward(img, traj, accurate_cfg());
    for (const cplx& v : s.v) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-3);
    const auto s_def = nufft_forward(img, traj, cfg);
    for (const cplx& v : s_def.v) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-2);
  }

  SUBCASE("matches the reference transform") {
    const auto img = random_image(32, 10);
    const auto traj = random_traj(32, 200, 11);
    const auto exact = ndft_forward(img, traj);
    CHECK(rel_l2(nufft_forward(img, traj, accurate_cfg()).v, exact.v) < 1e-3);
    CHECK(rel_l2(nufft_forward(img, traj, cfg).v, exact.v) < 1e-2);
  }

  SUBCASE("integer cartesian trajectory matches the exact DFT") {
    const int n = 32;
    const auto img = random_image(n, 12);
    std::vector<Vec2> pts;
    for (int v = -n / 2; v < n / 2; ++v) {
      for (int u = -n / 2; u < n / 2; ++u) pts.push_back({(double)u, (double)v});
    }
    const Trajectory traj(1, n * n, std::move(pts), 1e-5, n);
    const auto exact = ndft_forward(img, traj);
    CHECK(rel_l2(nufft_forward(img, traj, accurate_cfg()).v, exact.v) < 1e-3);
    CHECK(rel_l2(nufft_forward(img, traj, cfg).v, exact.v) < 1e-2);
  }

  SUBCASE("linearity") {
    const auto x = random_image(32, 13);
    const auto y = random_image(32, 14);
    const auto traj = random_traj(32, 64, 15);
    ComplexImage mix(32);
    const cplx a{0.7, -0.2}, b{-1.1, 0.4};
    for (size_t i = 0; i < mix.v.size(); ++i) mix.v[i] = a * x.v[i] + b * y.v[i];
    const auto s_mix = nufft_forward(mix, traj, cfg);
    const auto s_x = nufft_forward(x, traj, cfg);
    const auto s_y = nufft_forward(y, traj, cfg);
    double worst = 0.0;
    for (size_t i = 0; i < s_mix.v.size(); ++i) {
      worst = std::max(worst, std::abs(s_mix.v[i] - (a * s_x.v[i] + b * s_y.v[i])));
    }
    CHECK(worst < 1e-10);
  }

  SUBCASE("coordinate outside the grid is rejected") {
    // Bypass the trajectory clamp by mutating in place.
    Trajectory traj = random_traj(32, 4, 16);
    traj.points()[2].x = 17.0;
    CHECK_THROWS_AS(nufft_forward(random_image(32, 17), traj, cfg), std::invalid_argument);
  }
}

TEST_CASE("adjoint transform") {
  NufftConfig cfg;

  SUBCASE("zero samples map to a zero image") {
    const auto img = nufft_adjoint(KSpaceSamples(1, 50), random_traj(32, 50, 18), cfg, 32);
    for (const cplx& v : img.v) CHECK(std::abs(v) == 0.0);
  }

  SUBCASE("exact adjointness of the discretized pair") {
    const auto traj = random_traj(32, 120, 19);
    const auto x = random_image(32, 20);
    KSpaceSamples y(1, 120);
    Rng rng(21);
    for (cplx& v : y.v) v = {rng.gauss(), rng.gauss()};
    const auto fx = nufft_forward(x, traj, cfg);
    const auto aty = nufft_adjoint(y, traj, cfg, 32);
    const cplx lhs = dot(fx.v, y.v);
    const cplx rhs = dot(x.v, aty.v);
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-10);
  }

  SUBCASE("matches the reference adjoint") {
    const auto traj = random_traj(32, 200, 22);
    KSpaceSamples y(1, 200);
    Rng rng(23);
    for (cplx& v : y.v) v = {rng.gauss(), rng.gauss()};
    const auto exact = ndft_adjoint(y, traj, 32);
    CHECK(rel_l2(nufft_adjoint(y, traj, accurate_cfg(), 32).v, exact.v) < 1e-3);
    CHECK(rel_l2(nufft_adjoint(y, traj, cfg, 32).v, exact.v) < 1e-2);
  }
}

TEST_CASE("coordinate gradients") {
  NufftConfig cfg;
  const int n = 32, m = 50;

  SUBCASE("constant k-space from a centered impulse gives near-zero gradient") {
    ComplexImage img(n);
    img.at(n / 2, n / 2) = 1.0;
    const auto traj = random_traj(n, m, 24);
    KSpaceSamples up(1, m);
    for (cplx& v : up.v) v = {1.0, 0.0};
    const auto grad = nufft_forward_grad_k(img, traj, accurate_cfg(), up);
    for (const Vec2& g : grad) CHECK(g.norm() < 1e-3);
  }

  SUBCASE("zero upstream gives zero gradient") {
    const auto img = random_image(n, 25);
    const auto traj = random_traj(n, m, 26);
    const auto g_fwd = nufft_forward_grad_k(img, traj, cfg, KSpaceSamples(1, m));
    for (const Vec2& g : g_fwd) CHECK(g.norm() == 0.0);
    const auto g_adj = nufft_adjoint_grad_k(KSpaceSamples(1, m), traj, cfg, n, ComplexImage(n));
    for (const Vec2& g : g_adj) CHECK(g.norm() == 0.0);
  }

  SUBCASE("forward gradient matches finite differences") {
    const auto img = random_image(n, 27);
    const auto traj = random_traj(n, m, 28, true);
    KSpaceSamples up(1, m);
    Rng rng(29);
    for (cplx& v : up.v) v = {rng.gauss(), rng.gauss()};

    auto objective = [&](const Trajectory& t) {
      const auto s = nufft_forward(img, t, cfg);
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += (std::conj(up.v[i]) * s.v[i]).real();
      return acc;
    };
    const auto grad = nufft_forward_grad_k(img, traj, cfg, up);
    const double h = 1e-3;
    Rng pick(30);
    for (int probe = 0; probe < 20; ++probe) {
      const int idx = pick.uniform_int(0, m - 1);
      const bool is_x = pick.uniform() < 0.5;
      Trajectory plus = traj, minus = traj;
      (is_x ? plus.points()[idx].x : plus.points()[idx].y) += h;
      (is_x ? minus.points()[idx].x : minus.points()[idx].y) -= h;
      const double fd = (objective(plus) - objective(minus)) / (2.0 * h);
      const double an = is_x ? grad[idx].x : grad[idx].y;
      CHECK(std::abs(fd - an) / std::max(1e-8, std::abs(fd)) < 1e-2);
    }
  }

  SUBCASE("adjoint gradient matches finite differences") {
    const auto traj = random_traj(n, m, 31, true);
    KSpaceSamples samples(1, m);
    Rng rng(32);
    for (cplx& v : samples.v) v = {rng.gauss(), rng.gauss()};
    const auto up = random_image(n, 33);

    auto objective = [&](const Trajectory& t) {
      const auto img = nufft_adjoint(samples, t, cfg, n);
      double acc = 0.0;
      for (size_t i = 0; i < img.v.size(); ++i) acc += (std::conj(up.v[i]) * img.v[i]).real();
      return acc;
    };
    const auto grad = nufft_adjoint_grad_k(samples, traj, cfg, n, up);
    const double h = 1e-3;
    Rng pick(34);
    for (int probe = 0; probe < 20; ++probe) {
      const int idx = pick.uniform_int(0, m - 1);
      const bool is_x = pick.uniform() < 0.5;
      Trajectory plus = traj, minus = traj;
      (is_x ? plus.points()[idx].x : plus.points()[idx].y) += h;
      (is_x ? minus.points()[idx].x : minus.points()[idx].y) -= h;
      const double fd = (objective(plus) - objective(minus)) / (2.0 * h);
      const double an = is_x ? grad[idx].x : grad[idx].y;
      CHECK(std::abs(fd - an) / std::max(1e-8, std::abs(fd)) < 1e-2);
    }
  }
}

TEST_CASE("translation by one oversampled cell stays consistent with the phase model") {
  NufftConfig cfg;
  const int n = 32;
  const auto img = random_image(n, 35);
  Rng rng(36);
  std::vector<Vec2> pts(64);
  for (auto& p : pts) p = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
  std::vector<Vec2> shifted = pts;
  const double cell = static_cast<double>(n) / nufft_plan(n, accurate_cfg()).grid_size();
  for (auto& p : shifted) p.x += cell;
  const Trajectory t1(1, 64, shifted, 1e-5, n);
  const auto fast = nufft_forward(img, t1, accurate_cfg());
  const auto exact = ndft_forward(img, t1);
  CHECK(rel_l2(fast.v, exact.v) < 1e-3);
}

#include "ktraj/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ktraj/rng.hpp"

namespace ktraj {
namespace {

struct DenseCurve {
  std::vector<Vec2> pts;
  std::vector<double> arc;  // cumulative chord length
  double length() const { return arc.back(); }
};

DenseCurve densify(const std::function<Vec2(double)>& f, int segments) {
  DenseCurve c;
  c.pts.resize(segments + 1);
  c.arc.resize(segments + 1);
  for (int k = 0; k <= segments; ++k) c.pts[k] = f(static_cast<double>(k) / segments);
  c.arc[0] = 0.0;
  for (int k = 1; k <= segments; ++k) {
    c.arc[k] = c.arc[k - 1] + (c.pts[k] - c.pts[k - 1]).norm();
  }
  return c;
}

// Menger curvature of the circumcircle through three consecutive points.
std::vector<double> polyline_curvature(const DenseCurve& c) {
  const size_t k = c.pts.size();
  std::vector<double> kappa(k, 0.0);
  for (size_t i = 1; i + 1 < k; ++i) {
    const Vec2 a = c.pts[i] - c.pts[i - 1];
    const Vec2 b = c.pts[i + 1] - c.pts[i];
    const Vec2 d = c.pts[i + 1] - c.pts[i - 1];
    const double cross = std::abs(a.x * b.y - a.y * b.x);
    const double denom = a.norm() * b.norm() * d.norm();
    kappa[i] = denom > 1e-300 ? 2.0 * cross / denom : 0.0;
  }
  if (k > 2) {
    kappa[0] = kappa[1];
    kappa[k - 1] = kappa[k - 2];
  }
  return kappa;
}

Vec2 point_at_arc(const DenseCurve& c, double l, size_t& hint) {
  while (hint + 1 < c.arc.size() && c.arc[hint + 1] < l) ++hint;
  if (hint + 1 >= c.arc.size()) return c.pts.back();
  const double seg = c.arc[hint + 1] - c.arc[hint];
  const double t = seg > 0 ? (l - c.arc[hint]) / seg : 0.0;
  return c.pts[hint] + t * (c.pts[hint + 1] - c.pts[hint]);
}

double cap_at_arc(const DenseCurve& c, const std::vector<double>& cap, double l, size_t& hint) {
  while (hint + 1 < c.arc.size() && c.arc[hint + 1] < l) ++hint;
  if (hint + 1 >= c.arc.size()) return cap.back();
  const double seg = c.arc[hint + 1] - c.arc[hint];
  const double t = seg > 0 ? std::clamp((l - c.arc[hint]) / seg, 0.0, 1.0) : 0.0;
  return cap[hint] + t * (cap[hint + 1] - cap[hint]);
}

struct PlanAttempt {
  std::vector<Vec2> samples;
  bool complete = false;
};

// Marches along the dense curve in sample time: each step advances by the
// current speed, the speed is bounded by a curvature-derived cap (centripetal
// share of a_max), a per-sample tangential budget, and a braking-aware
// backward pass so that upcoming slow sections are reachable.
PlanAttempt march(const DenseCurve& curve, const std::vector<double>& kappa, int m, double v_max,
                  double a_max, double margin) {
  const double v_cap = margin * v_max;
  const double a_cent = 0.5 * margin * a_max;
  const double a_tan = 0.3 * margin * a_max;

  const size_t kn = curve.pts.size();
  std::vector<double> cap(kn);
  for (size_t i = 0; i < kn; ++i) {
    cap[i] = std::min(v_cap, std::sqrt(a_cent / std::max(kappa[i], 1e-12)));
  }
  // Terminal stop keeps padding at the endpoint feasible.
  cap[kn - 1] = std::min(cap[kn - 1], 0.5 * margin * a_max);
  for (size_t i = kn - 1; i-- > 0;) {
    const double dl = curve.arc[i + 1] - curve.arc[i];
    cap[i] = std::min(cap[i], std::sqrt(cap[i + 1] * cap[i + 1] + 2.0 * a_tan * dl));
  }

  PlanAttempt out;
  out.samples.reserve(m);
  out.samples.push_back(curve.pts.front());
  const double total = curve.length();
  double l = 0.0;
  double v = 0.0;
  size_t hint_pt = 0, hint_cap = 0;
  while (static_cast<int>(out.samples.size()) < m) {
    size_t probe = hint_cap;
    const double ahead = cap_at_arc(curve, cap, l + v, probe);
    v = std::min(v + a_tan, ahead);
    v = std::max(v, 1e-9 * std::max(total, 1.0));  // always make progress
    l += v;
    if (l >= total) {
      out.complete = true;
      break;
    }
    hint_cap = probe > 0 ? probe - 1 : 0;
    out.samples.push_back(point_at_arc(curve, l, hint_pt));
  }
  if (out.complete) {
    while (static_cast<int>(out.samples.size()) < m) out.samples.push_back(curve.pts.back());
  }
  return out;
}

bool within_limits(const std::vector<Vec2>& pts, double v_max, double a_max) {
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if ((pts[i + 1] - pts[i]).norm() > v_max) return false;
  }
  for (size_t i = 0; i + 2 < pts.size(); ++i) {
    if ((pts[i + 2] - 2.0 * pts[i + 1] + pts[i]).norm() > a_max) return false;
  }
  return true;
}

// Plans one shot. When the full-speed traversal finishes early, a global
// speed scale is searched so the m samples spread over the whole curve
// instead of idling at the end.
PlanAttempt plan_shot(const std::function<Vec2(double)>& f, int m, double v_max, double a_max) {
  const int segments = std::max(8192, 16 * m);
  const DenseCurve curve = densify(f, segments);
  const auto kappa = polyline_curvature(curve);

  double margin = 0.995;
  for (int attempt = 0; attempt < 12; ++attempt, margin *= 0.75) {
    PlanAttempt full = march(curve, kappa, m, v_max, a_max, margin);
    if (!full.complete) {
      if (within_limits(full.samples, v_max, a_max)) return full;
      continue;
    }
    // Slow down until completion just fits into the m samples.
    double lo = 1e-3, hi = 1.0;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (march(curve, kappa, m, v_max, a_max, margin * mid).complete) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    PlanAttempt scaled = march(curve, kappa, m, v_max, a_max, margin * hi);
    if (scaled.complete && within_limits(scaled.samples, v_max, a_max)) return scaled;
    if (within_limits(full.samples, v_max, a_max)) return full;
  }
  throw numeric_error("speed-limited planner failed to find a feasible traversal");
}

Vec2 rotate(const Vec2& p, double cs, double sn) {
  return {cs * p.x - sn * p.y, sn * p.x + cs * p.y};
}

GeneratorResult assemble_rotated(const HardwareSpec& spec, int n_shots, int m,
                                 const PlanAttempt& base, double angle_step) {
  std::vector<Vec2> coords;
  coords.reserve(static_cast<size_t>(n_shots) * m);
  for (int s = 0; s < n_shots; ++s) {
    const double a = angle_step * s;
    const double cs = std::cos(a), sn = std::sin(a);
    for (const Vec2& p : base.samples) coords.push_back(rotate(p, cs, sn));
  }
  return {Trajectory(n_shots, m, std::move(coords), spec.dt, spec.n), base.complete};
}

}  // namespace

GeneratorResult spiral(const HardwareSpec& spec, int n_shots, int m, const SpiralOptions& opts) {
  spec.validate();
  if (n_shots < 1) throw std::invalid_argument("spiral: need at least one shot");
  if (m < 3) throw std::invalid_argument("spiral: need at least 3 samples per shot");
  const double radius = spec.n / 2.0;
  const double turns =
      opts.turns > 0 ? opts.turns : std::max(1.0, static_cast<double>(m) / (2.0 * spec.n));
  const double rho = opts.density_exponent;
  auto f = [&](double tau) -> Vec2 {
    const double r = radius * std::pow(tau, rho);
    const double th = 2.0 * M_PI * turns * tau;
    return {r * std::cos(th), r * std::sin(th)};
  };
  const PlanAttempt base = plan_shot(f, m, spec.v_max_grid(), spec.a_max_grid());
  return assemble_rotated(spec, n_shots, m, base, 2.0 * M_PI / n_shots);
}

GeneratorResult radial(const HardwareSpec& spec, int n_shots, int m) {
  spec.validate();
  if (n_shots < 1) throw std::invalid_argument("radial: need at least one shot");
  if (m < 3) throw std::invalid_argument("radial: need at least 3 samples per shot");
  const double radius = spec.n / 2.0;
  PlanAttempt base;
  const double uniform_speed = 2.0 * radius / (m - 1);
  if (uniform_speed <= 0.999 * spec.v_max_grid()) {
    base.complete = true;
    base.samples.resize(m);
    for (int i = 0; i < m; ++i) {
      base.samples[i] = {-radius + uniform_speed * i, 0.0};
    }
    base.samples[m - 1] = {radius, 0.0};
  } else {
    auto f = [&](double tau) -> Vec2 { return {-radius + 2.0 * radius * tau, 0.0}; };
    base = plan_shot(f, m, spec.v_max_grid(), spec.a_max_grid());
  }
  return assemble_rotated(spec, n_shots, m, base, M_PI / n_shots);
}

GeneratorResult cartesian(const HardwareSpec& spec, int n_shots, int m) {
  spec.validate();
  if (n_shots < 1) throw std::invalid_argument("cartesian: need at least one shot");
  if (m < 3) throw std::invalid_argument("cartesian: need at least 3 samples per shot");
  const double radius = spec.n / 2.0;
  PlanAttempt base;
  const double uniform_speed = 2.0 * radius / (m - 1);
  if (uniform_speed <= 0.999 * spec.v_max_grid()) {
    base.complete = true;
    base.samples.resize(m);
    for (int i = 0; i < m; ++i) base.samples[i] = {-radius + uniform_speed * i, 0.0};
    base.samples[m - 1] = {radius, 0.0};
  } else {
    auto f = [&](double tau) -> Vec2 { return {-radius + 2.0 * radius * tau, 0.0}; };
    base = plan_shot(f, m, spec.v_max_grid(), spec.a_max_grid());
  }

  std::vector<Vec2> coords;
  coords.reserve(static_cast<size_t>(n_shots) * m);
  for (int s = 0; s < n_shots; ++s) {
    const double ky = n_shots == 1
                          ? 0.0
                          : -radius + 2.0 * radius * static_cast<double>(s) / (n_shots - 1);
    for (const Vec2& p : base.samples) coords.push_back({p.x, ky});
  }
  return {Trajectory(n_shots, m, std::move(coords), spec.dt, spec.n), base.complete};
}

Trajectory gaussian_init(int n, int m, uint64_t seed, double dwell_time) {
  if (m < 1) throw std::invalid_argument("gaussian_init: need at least one sample");
  Rng rng(mix_seed(seed, 0x6a5573e1u));
  const double sigma = n / 6.0;
  std::vector<Vec2> coords(m);
  for (int i = 0; i < m; ++i) {
    coords[i] = {sigma * rng.gauss(), sigma * rng.gauss()};
  }
  return Trajectory(1, m, std::move(coords), dwell_time, n);
}

}  // namespace ktraj

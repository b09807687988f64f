#include "ktraj/spline.hpp"

#include <algorithm>
#include <cmath>

namespace ktraj {
namespace {

// Solves the tridiagonal system of the natural spline (diag 4, off-diag 1)
// in place. rhs has one entry per interior knot.
void solve_interior(std::vector<Vec2>& rhs) {
  const size_t k = rhs.size();
  if (k == 0) return;
  std::vector<double> diag(k, 4.0);
  for (size_t i = 1; i < k; ++i) {
    const double w = 1.0 / diag[i - 1];
    diag[i] -= w;                // 4 - 1/diag
    rhs[i] -= rhs[i - 1] * w;    // forward elimination
  }
  rhs[k - 1] = rhs[k - 1] * (1.0 / diag[k - 1]);
  for (size_t i = k - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - rhs[i + 1]) * (1.0 / diag[i]);
  }
}

}  // namespace

SplineCurve::SplineCurve(std::vector<Vec2> control_points) : ctrl_(std::move(control_points)) {
  const int c = count();
  if (c < 2) throw std::invalid_argument("SplineCurve: need at least 2 control points");
  second_.assign(c, Vec2{});
  if (c == 2) return;
  // Interior equations M[i-1] + 4 M[i] + M[i+1] = 6 (P[i-1] - 2 P[i] + P[i+1]).
  std::vector<Vec2> rhs(c - 2);
  for (int i = 1; i + 1 < c; ++i) {
    rhs[i - 1] = 6.0 * (ctrl_[i - 1] - 2.0 * ctrl_[i] + ctrl_[i + 1]);
  }
  solve_interior(rhs);
  for (int i = 1; i + 1 < c; ++i) second_[i] = rhs[i - 1];
}

Vec2 SplineCurve::eval(double t) const {
  const int c = count();
  t = std::clamp(t, 0.0, static_cast<double>(c - 1));
  int i = std::min(static_cast<int>(std::floor(t)), c - 2);
  const double s = t - i;
  const double a = ((1.0 - s) * (1.0 - s) * (1.0 - s) - (1.0 - s)) / 6.0;
  const double b = (s * s * s - s) / 6.0;
  return (1.0 - s) * ctrl_[i] + s * ctrl_[i + 1] + a * second_[i] + b * second_[i + 1];
}

std::vector<Vec2> spline_resample(const std::vector<Vec2>& control_points, int m) {
  if (m < 2) throw std::invalid_argument("spline_resample: need at least 2 output points");
  SplineCurve curve(control_points);
  const int c = curve.count();
  std::vector<Vec2> out(m);
  const double step = static_cast<double>(c - 1) / (m - 1);
  for (int j = 0; j < m; ++j) out[j] = curve.eval(j * step);
  return out;
}

std::vector<Vec2> spline_resample_grad(const std::vector<Vec2>& control_points, int m,
                                       const std::vector<Vec2>& upstream) {
  if (m < 2) throw std::invalid_argument("spline_resample_grad: need at least 2 output points");
  const int c = static_cast<int>(control_points.size());
  if (c < 2) throw std::invalid_argument("spline_resample_grad: need at least 2 control points");
  if (upstream.size() != static_cast<size_t>(m)) {
    throw std::invalid_argument("spline_resample_grad: upstream size mismatch");
  }

  // The resampled points are out_j = (1-s) P_i + s P_{i+1} + a M_i + b M_{i+1}
  // with M = 6 T^{-1} D P (T symmetric tridiagonal, D the second-difference
  // map, natural ends dropped). The adjoint accumulates the direct terms and
  // routes the M terms back through T^{-1} and D^T.
  std::vector<Vec2> grad(c, Vec2{});
  std::vector<Vec2> g_second(c, Vec2{});
  const double step = static_cast<double>(c - 1) / (m - 1);
  for (int j = 0; j < m; ++j) {
    double t = std::clamp(j * step, 0.0, static_cast<double>(c - 1));
    int i = std::min(static_cast<int>(std::floor(t)), c - 2);
    const double s = t - i;
    const double a = ((1.0 - s) * (1.0 - s) * (1.0 - s) - (1.0 - s)) / 6.0;
    const double b = (s * s * s - s) / 6.0;
    grad[i] += (1.0 - s) * upstream[j];
    grad[i + 1] += s * upstream[j];
    g_second[i] += a * upstream[j];
    g_second[i + 1] += b * upstream[j];
  }
  if (c > 2) {
    std::vector<Vec2> z(g_second.begin() + 1, g_second.end() - 1);
    solve_interior(z);  // T is symmetric, so the adjoint solve reuses it
    for (int i = 1; i + 1 < c; ++i) {
      const Vec2 w = 6.0 * z[i - 1];
      grad[i - 1] += w;
      grad[i] -= 2.0 * w;
      grad[i + 1] += w;
    }
  }
  return grad;
}

}  // namespace ktraj

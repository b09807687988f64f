#pragma once

#include <vector>

#include "ktraj/types.hpp"

namespace ktraj {

// Natural cubic spline through control points on a uniform parameter grid
// t = 0, 1, ..., c-1. Interpolates every control point exactly, has continuous
// first and second derivatives at interior knots, and zero second derivative
// at both ends. For c == 2 the curve is the straight segment.
class SplineCurve {
 public:
  explicit SplineCurve(std::vector<Vec2> control_points);  // c >= 2

  int count() const { return static_cast<int>(ctrl_.size()); }
  const std::vector<Vec2>& control_points() const { return ctrl_; }

  // t in [0, c-1]; values outside are clamped to the parameter range.
  Vec2 eval(double t) const;

 private:
  std::vector<Vec2> ctrl_;
  std::vector<Vec2> second_;  // knot second derivatives, natural ends = 0
};

// Evaluates the spline at m uniform parameter values spanning [0, c-1],
// including both endpoints. The map from control points to output points is
// linear. m >= 2.
std::vector<Vec2> spline_resample(const std::vector<Vec2>& control_points, int m);

// Adjoint of the linear resampling map: given dLoss/d(output points), returns
// dLoss/d(control points).
std::vector<Vec2> spline_resample_grad(const std::vector<Vec2>& control_points, int m,
                                       const std::vector<Vec2>& upstream);

}  // namespace ktraj

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ktraj {

using cplx = std::complex<double>;

// Thrown when a computation produces non-finite values (maps to CLI exit 3).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Square image of complex pixel values, row-major. Pixel (ix, iy) maps to the
// centered grid index (u, v) = (ix - n/2, iy - n/2).
struct ComplexImage {
  int n = 0;
  std::vector<cplx> v;

  ComplexImage() = default;
  explicit ComplexImage(int n_) : n(n_), v(static_cast<size_t>(n_) * n_) {}

  cplx& at(int iy, int ix) { return v[static_cast<size_t>(iy) * n + ix]; }
  const cplx& at(int iy, int ix) const { return v[static_cast<size_t>(iy) * n + ix]; }
};

struct RealImage {
  int n = 0;
  std::vector<double> v;

  RealImage() = default;
  explicit RealImage(int n_) : n(n_), v(static_cast<size_t>(n_) * n_, 0.0) {}

  double& at(int iy, int ix) { return v[static_cast<size_t>(iy) * n + ix]; }
  const double& at(int iy, int ix) const { return v[static_cast<size_t>(iy) * n + ix]; }
};

// Complex measurements along a trajectory, one value per (shot, sample).
struct KSpaceSamples {
  int shots = 0;
  int m = 0;
  std::vector<cplx> v;

  KSpaceSamples() = default;
  KSpaceSamples(int shots_, int m_) : shots(shots_), m(m_), v(static_cast<size_t>(shots_) * m_) {}

  cplx& at(int shot, int i) { return v[static_cast<size_t>(shot) * m + i]; }
  const cplx& at(int shot, int i) const { return v[static_cast<size_t>(shot) * m + i]; }
};

// One coil channel per entry; all channels share the grid size.
using MultiChannelImage = std::vector<ComplexImage>;

// A fully sampled multi-channel image paired with its root-sum-of-squares
// reconstruction target.
struct TrainingSample {
  MultiChannelImage channels;
  RealImage target;
};

using Dataset = std::vector<TrainingSample>;

}  // namespace ktraj

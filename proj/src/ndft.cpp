#include "ktraj/ndft.hpp"

#include <cmath>

namespace ktraj {

KSpaceSamples ndft_forward(const ComplexImage& image, const Trajectory& traj) {
  const int n = image.n;
  const int h = n / 2;
  KSpaceSamples out(traj.shots(), traj.samples_per_shot());
  const auto& pts = traj.points();
  for (size_t s = 0; s < pts.size(); ++s) {
    cplx acc{0.0, 0.0};
    for (int v = -h; v < h; ++v) {
      for (int u = -h; u < h; ++u) {
        const double phase = -2.0 * M_PI * (pts[s].x * u + pts[s].y * v) / n;
        acc += image.at(v + h, u + h) * cplx{std::cos(phase), std::sin(phase)};
      }
    }
    out.v[s] = acc;
  }
  return out;
}

ComplexImage ndft_adjoint(const KSpaceSamples& samples, const Trajectory& traj, int n) {
  const int h = n / 2;
  const auto& pts = traj.points();
  if (samples.v.size() != pts.size()) {
    throw std::invalid_argument("ndft_adjoint: sample count does not match trajectory");
  }
  ComplexImage out(n);
  for (int v = -h; v < h; ++v) {
    for (int u = -h; u < h; ++u) {
      cplx acc{0.0, 0.0};
      for (size_t s = 0; s < pts.size(); ++s) {
        const double phase = 2.0 * M_PI * (pts[s].x * u + pts[s].y * v) / n;
        acc += samples.v[s] * cplx{std::cos(phase), std::sin(phase)};
      }
      out.at(v + h, u + h) = acc;
    }
  }
  return out;
}

}  // namespace ktraj

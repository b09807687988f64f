#pragma once

#include "ktraj/trajectory.hpp"
#include "ktraj/types.hpp"

namespace ktraj {

// Direct O(n^2 * m) non-uniform DFT and its conjugate transpose. Serial
// reference implementations: the fast transforms are validated against these,
// and the benchmark target compares against them. Keep them independent of
// the gridded path.
KSpaceSamples ndft_forward(const ComplexImage& image, const Trajectory& traj);
ComplexImage ndft_adjoint(const KSpaceSamples& samples, const Trajectory& traj, int n);

}  // namespace ktraj

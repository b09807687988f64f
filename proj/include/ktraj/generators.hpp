#pragma once

#include <cstdint>

#include "ktraj/trajectory.hpp"

namespace ktraj {

struct SpiralOptions {
  double density_exponent = 1.5;
  // Revolutions per shot; 0 picks m/(2n) so that consecutive-revolution
  // spacing matches the decimation rate of the request.
  double turns = 0.0;
};

struct GeneratorResult {
  Trajectory traj;
  // False when m samples were not enough to finish the curve under the
  // hardware limits; the trajectory is then the feasible prefix.
  bool coverage_complete = true;
};

// Variable-density spiral r = (n/2) * tau^density_exponent, one rotation
// offset of 2*pi*s/N_shots per shot. Samples are placed by a greedy
// speed-limited traversal so the result respects the hardware limits.
GeneratorResult spiral(const HardwareSpec& spec, int n_shots, int m,
                       const SpiralOptions& opts = {});

// Diameters through the origin at angles pi*s/N_shots, uniformly sampled when
// the uniform speed fits the limits, otherwise speed-limited.
GeneratorResult radial(const HardwareSpec& spec, int n_shots, int m);

// Horizontal lines at equispaced ky covering [-n/2, n/2], traversed
// left-to-right.
GeneratorResult cartesian(const HardwareSpec& spec, int n_shots, int m);

// Unordered i.i.d. point cloud, each coordinate N(0, (n/6)^2) clamped to the
// grid, returned as a single shot. Deterministic per seed.
Trajectory gaussian_init(int n, int m, uint64_t seed, double dwell_time = 1e-5);

}  // namespace ktraj

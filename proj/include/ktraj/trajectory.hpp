#pragma once

#include <vector>

#include "ktraj/types.hpp"

namespace ktraj {

// Scanner limits and imaging geometry. Owns every unit conversion between
// physical gradient/slew quantities and k-space grid units
// (one grid unit = 1/FOV cycles/meter).
struct HardwareSpec {
  double g_max = 40.0;      // peak gradient, mT/m
  double s_max = 200.0;     // max slew rate, T/m/s
  double dt = 1.0e-5;       // dwell time, s
  double gamma = 42.576e6;  // gyromagnetic ratio, Hz/T (cycles convention)
  double fov = 0.2;         // field of view, m
  int n = 64;               // grid size, pixels per side

  // Largest per-sample k-space step, grid units/sample.
  double v_max_grid() const { return gamma * (g_max * 1e-3) * dt * fov; }
  // Largest per-sample step change, grid units/sample^2.
  double a_max_grid() const { return gamma * s_max * dt * dt * fov; }

  void validate() const;  // throws std::invalid_argument on nonpositive fields
};

// Ordered k-space sample coordinates, N_shots x m, in grid units.
// Coordinates are clamped to [-n/2, n/2] at construction and must be finite.
class Trajectory {
 public:
  Trajectory(int n_shots, int samples_per_shot, std::vector<Vec2> coords, double dwell_time,
             int grid_n);

  int shots() const { return shots_; }
  int samples_per_shot() const { return m_; }
  int grid_size() const { return grid_n_; }
  double dwell_time() const { return dwell_; }

  const Vec2& at(int shot, int i) const { return pts_[static_cast<size_t>(shot) * m_ + i]; }
  Vec2& at(int shot, int i) { return pts_[static_cast<size_t>(shot) * m_ + i]; }
  const std::vector<Vec2>& points() const { return pts_; }
  std::vector<Vec2>& points() { return pts_; }

  // Re-applies the construction clamp. The training loop owns mutation of the
  // coordinates and calls this after each update.
  void clamp_to_grid();

 private:
  int shots_;
  int m_;
  int grid_n_;
  double dwell_;
  std::vector<Vec2> pts_;  // row-major, shots x m
};

struct FeasibilityReport {
  double max_velocity_violation = 0.0;      // grid units/sample
  double max_acceleration_violation = 0.0;  // grid units/sample^2
  long violating_sample_count = 0;
  bool feasible = true;
  double tolerance = 0.0;
};

struct PenaltyResult {
  double value = 0.0;
  std::vector<Vec2> grad;  // same layout as Trajectory::points()
};

// Per-shot gradient and slew waveforms in physical units. Each shot has
// m-1 gradient samples and m-2 slew samples.
struct Waveforms {
  int shots = 0;
  int m = 0;
  std::vector<std::vector<Vec2>> gradient_mT_m;
  std::vector<std::vector<Vec2>> slew_T_m_s;
};

// First differences of the coordinates within each shot, grid units/sample.
// Division by dt is deferred to the waveform conversion.
std::vector<std::vector<Vec2>> velocities(const Trajectory& traj);

// Second differences within each shot, grid units/sample^2.
std::vector<std::vector<Vec2>> accelerations(const Trajectory& traj);

// Hinge penalty lambda_v * sum max(0, |v|-v_max) + lambda_a * sum max(0, |a|-a_max)
// over all shots, with the exact subgradient w.r.t. every coordinate
// (0 at the hinge kink and at zero-norm difference vectors).
PenaltyResult constraint_penalty(const Trajectory& traj, const HardwareSpec& spec, double lambda_v,
                                 double lambda_a);

FeasibilityReport feasibility_report(const Trajectory& traj, const HardwareSpec& spec,
                                     double tolerance);

// G = v_grid / (gamma*dt*fov), S = a_grid / (gamma*dt^2*fov).
Waveforms to_waveforms(const Trajectory& traj, const HardwareSpec& spec);

}  // namespace ktraj

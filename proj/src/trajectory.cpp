#include "ktraj/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace ktraj {

void HardwareSpec::validate() const {
  if (g_max <= 0 || s_max <= 0 || dt <= 0 || gamma <= 0 || fov <= 0 || n <= 0) {
    throw std::invalid_argument("HardwareSpec: all fields must be strictly positive");
  }
  if (!std::isfinite(v_max_grid()) || !std::isfinite(a_max_grid())) {
    throw std::invalid_argument("HardwareSpec: derived grid bounds are not finite");
  }
}

Trajectory::Trajectory(int n_shots, int samples_per_shot, std::vector<Vec2> coords,
                       double dwell_time, int grid_n)
    : shots_(n_shots), m_(samples_per_shot), grid_n_(grid_n), dwell_(dwell_time),
      pts_(std::move(coords)) {
  if (shots_ < 1 || m_ < 1) throw std::invalid_argument("Trajectory: empty trajectory");
  if (grid_n_ < 2) throw std::invalid_argument("Trajectory: grid size too small");
  if (dwell_ <= 0) throw std::invalid_argument("Trajectory: dwell time must be positive");
  if (pts_.size() != static_cast<size_t>(shots_) * m_) {
    throw std::invalid_argument("Trajectory: coordinate count does not match shots*m");
  }
  for (const Vec2& p : pts_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("Trajectory: coordinates must be finite");
    }
  }
  clamp_to_grid();
}

void Trajectory::clamp_to_grid() {
  const double half = grid_n_ / 2.0;
  for (Vec2& p : pts_) {
    p.x = std::clamp(p.x, -half, half);
    p.y = std::clamp(p.y, -half, half);
  }
}

std::vector<std::vector<Vec2>> velocities(const Trajectory& traj) {
  const int m = traj.samples_per_shot();
  if (m < 2) throw std::invalid_argument("velocities: shot too short");
  std::vector<std::vector<Vec2>> out(traj.shots());
  for (int s = 0; s < traj.shots(); ++s) {
    out[s].resize(m - 1);
    for (int i = 0; i + 1 < m; ++i) out[s][i] = traj.at(s, i + 1) - traj.at(s, i);
  }
  return out;
}

std::vector<std::vector<Vec2>> accelerations(const Trajectory& traj) {
  const int m = traj.samples_per_shot();
  if (m < 3) throw std::invalid_argument("accelerations: shot too short");
  std::vector<std::vector<Vec2>> out(traj.shots());
  for (int s = 0; s < traj.shots(); ++s) {
    out[s].resize(m - 2);
    for (int i = 0; i + 2 < m; ++i) {
      out[s][i] = traj.at(s, i + 2) - 2.0 * traj.at(s, i + 1) + traj.at(s, i);
    }
  }
  return out;
}

PenaltyResult constraint_penalty(const Trajectory& traj, const HardwareSpec& spec, double lambda_v,
                                 double lambda_a) {
  const int m = traj.samples_per_shot();
  const double v_max = spec.v_max_grid();
  const double a_max = spec.a_max_grid();
  PenaltyResult res;
  res.grad.assign(traj.points().size(), Vec2{});

  auto g = [&](int shot, int i) -> Vec2& {
    return res.grad[static_cast<size_t>(shot) * m + i];
  };

  for (int s = 0; s < traj.shots(); ++s) {
    for (int i = 0; i + 1 < m; ++i) {
      const Vec2 v = traj.at(s, i + 1) - traj.at(s, i);
      const double nv = v.norm();
      if (nv > v_max) {
        res.value += lambda_v * (nv - v_max);
        const Vec2 u = v * (lambda_v / nv);
        g(s, i + 1) += u;
        g(s, i) -= u;
      }
    }
    for (int i = 0; i + 2 < m; ++i) {
      const Vec2 a = traj.at(s, i + 2) - 2.0 * traj.at(s, i + 1) + traj.at(s, i);
      const double na = a.norm();
      if (na > a_max) {
        res.value += lambda_a * (na - a_max);
        const Vec2 u = a * (lambda_a / na);
        g(s, i + 2) += u;
        g(s, i + 1) -= 2.0 * u;
        g(s, i) += u;
      }
    }
  }
  return res;
}

FeasibilityReport feasibility_report(const Trajectory& traj, const HardwareSpec& spec,
                                     double tolerance) {
  const int m = traj.samples_per_shot();
  if (m < 2) throw std::invalid_argument("feasibility_report: shot too short");
  const double v_max = spec.v_max_grid();
  const double a_max = spec.a_max_grid();

  FeasibilityReport rep;
  rep.tolerance = tolerance;
  for (int s = 0; s < traj.shots(); ++s) {
    for (int i = 0; i + 1 < m; ++i) {
      const double excess = (traj.at(s, i + 1) - traj.at(s, i)).norm() - v_max;
      if (excess > rep.max_velocity_violation) rep.max_velocity_violation = excess;
      if (excess > tolerance) ++rep.violating_sample_count;
    }
    for (int i = 0; i + 2 < m; ++i) {
      const Vec2 a = traj.at(s, i + 2) - 2.0 * traj.at(s, i + 1) + traj.at(s, i);
      const double excess = a.norm() - a_max;
      if (excess > rep.max_acceleration_violation) rep.max_acceleration_violation = excess;
      if (excess > tolerance) ++rep.violating_sample_count;
    }
  }
  rep.max_velocity_violation = std::max(rep.max_velocity_violation, 0.0);
  rep.max_acceleration_violation = std::max(rep.max_acceleration_violation, 0.0);
  rep.feasible =
      rep.max_velocity_violation <= tolerance && rep.max_acceleration_violation <= tolerance;
  return rep;
}

Waveforms to_waveforms(const Trajectory& traj, const HardwareSpec& spec) {
  const double v_to_T_m = 1.0 / (spec.gamma * spec.dt * spec.fov);
  const double a_to_T_m_s = 1.0 / (spec.gamma * spec.dt * spec.dt * spec.fov);
  Waveforms wf;
  wf.shots = traj.shots();
  wf.m = traj.samples_per_shot();
  wf.gradient_mT_m.resize(wf.shots);
  wf.slew_T_m_s.resize(wf.shots);
  const auto vel = velocities(traj);
  for (int s = 0; s < wf.shots; ++s) {
    wf.gradient_mT_m[s].reserve(vel[s].size());
    for (const Vec2& v : vel[s]) wf.gradient_mT_m[s].push_back(v * (v_to_T_m * 1e3));
  }
  if (wf.m >= 3) {
    const auto acc = accelerations(traj);
    for (int s = 0; s < wf.shots; ++s) {
      wf.slew_T_m_s[s].reserve(acc[s].size());
      for (const Vec2& a : acc[s]) wf.slew_T_m_s[s].push_back(a * a_to_T_m_s);
    }
  }
  return wf;
}

}  // namespace ktraj

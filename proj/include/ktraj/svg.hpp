#pragma once

#include <string>

#include "ktraj/trajectory.hpp"

namespace ktraj {

// Renders the trajectory as an SVG: one stroke per segment, colored by the
// segment speed relative to the hardware limit (blue = slow, red = at limit).
void save_trajectory_svg(const std::string& path, const Trajectory& traj,
                         const HardwareSpec& spec);

}  // namespace ktraj

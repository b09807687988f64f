#include "ktraj/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ktraj {

void save_trajectory_svg(const std::string& path, const Trajectory& traj,
                         const HardwareSpec& spec) {
  const int size = 640;
  const double half = traj.grid_size() / 2.0;
  const double px_per_unit = (size - 40.0) / (2.0 * half);
  auto sx = [&](double x) { return 20.0 + (x + half) * px_per_unit; };
  auto sy = [&](double y) { return 20.0 + (half - y) * px_per_unit; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                size, size, size, size);
  out << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"20\" y=\"20\" width=\"%d\" height=\"%d\" fill=\"none\" "
                "stroke=\"#888\"/>\n",
                size - 40, size - 40);
  out << buf;

  const double v_max = spec.v_max_grid();
  for (int s = 0; s < traj.shots(); ++s) {
    for (int i = 0; i + 1 < traj.samples_per_shot(); ++i) {
      const Vec2 a = traj.at(s, i);
      const Vec2 b = traj.at(s, i + 1);
      const double speed = (b - a).norm();
      const double t = std::clamp(speed / v_max, 0.0, 1.0);
      const int r = static_cast<int>(255 * t);
      const int bl = static_cast<int>(255 * (1.0 - t));
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"rgb(%d,40,%d)\" stroke-width=\"1\"/>\n",
                    sx(a.x), sy(a.y), sx(b.x), sy(b.y), r, bl);
      out << buf;
    }
  }
  out << "</svg>\n";
}

}  // namespace ktraj

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ktraj/taskmodel.hpp"
#include "ktraj/trajectory.hpp"
#include "ktraj/types.hpp"

namespace ktraj {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ellipse in the unit square [-1, 1]^2: value added inside, half-axes (a, b),
// center (x0, y0), rotation in degrees.
struct Ellipse {
  double intensity;
  double a;
  double b;
  double x0;
  double y0;
  double phi_deg;
};

// The ten-ellipse head phantom table with intensities scaled into [0, 1].
const std::vector<Ellipse>& shepp_logan_ellipses();

// Rasterizes an ellipse table at pixel centers; overlapping intensities sum.
RealImage ellipse_phantom(int n, const std::vector<Ellipse>& ellipses);

RealImage shepp_logan(int n);

// Smooth complex coil profiles: Gaussian magnitude bumps centered on a circle
// of radius 0.6*(n/2) with seeded linear phase, normalized so the pixelwise
// sum of squared moduli is 1.
MultiChannelImage coil_sensitivities(int n, int l, uint64_t seed);

// channel_i = image * s_i; target is the root-sum-of-squares of the channels.
TrainingSample simulate_multichannel(const RealImage& image, const MultiChannelImage& sens);

struct DatasetSpec {
  int n = 64;
  int coils = 4;
  int train_count = 200;
  int val_count = 50;
  uint64_t seed = 0;
};

// Seeded phantom dataset: rigid rotations/translations plus intensity jitter
// of the base ellipse table. The train/validation split is seed-stable.
std::pair<Dataset, Dataset> make_phantom_dataset(const DatasetSpec& spec);

// --- file formats -----------------------------------------------------------
// trajectory: JSON {schema_version, n, fov, dt, gamma, n_shots, m, coords}
//             with coords row-major [x0, y0, x1, y1, ...]
// waveforms:  CSV shot,sample,Gx_mT_per_m,Gy_mT_per_m,Sx_T_per_m_s,Sy_T_per_m_s
// images:     raw little-endian float32 + JSON sidecar {shape, dtype, order}
// model:      raw little-endian float32 of the flattened parameters + sidecar
//             with the layer shapes

struct TrajectoryFile {
  int schema_version = 1;
  double fov = 0.2;
  double gamma = 42.576e6;
  Trajectory traj;
};

void save_trajectory(const std::string& path, const Trajectory& traj, double fov, double gamma);
TrajectoryFile load_trajectory(const std::string& path);

void save_waveforms_csv(const std::string& path, const Waveforms& wf);

void save_image(const std::string& path, const RealImage& image);
RealImage load_image(const std::string& path);

void save_model(const std::string& path, const TaskModelParams& params);
TaskModelParams load_model(const std::string& path);

// Metrics plus feasibility as a JSON report.
void save_report_json(const std::string& path, const FeasibilityReport& report, double psnr_db,
                      double ssim_value);

std::string report_to_json(const FeasibilityReport& report);

}  // namespace ktraj

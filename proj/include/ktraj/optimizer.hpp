#pragma once

#include <optional>
#include <span>

#include "ktraj/nufft.hpp"
#include "ktraj/taskmodel.hpp"
#include "ktraj/trajectory.hpp"

namespace ktraj {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void reset(size_t size);
};

// Bias-corrected update: params -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr);

struct MultiscaleSchedule {
  int initial_control_points = 8;
  int doubling_period = 50;  // epochs
};

struct OptimConfig {
  double lr_model = 0.001;
  double lr_traj = 0.01;
  double lambda_v = 0.1;
  double lambda_a = 0.1;
  int epochs = 100;
  int batch_size = 8;
  std::optional<MultiscaleSchedule> multiscale;
  uint64_t seed = 0;
  std::optional<double> snr_db;  // measurement noise injected at train and eval time
  // When the soft penalties leave residual violations, snap the returned
  // trajectory inside the limits (strict export).
  bool project_output = true;
  double output_tolerance = 1e-2;  // grid units/sample
  NufftConfig nufft;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  int stage = 0;  // 0 for plain runs, 2/4 for the staged pipeline
  double loss = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double max_violation = 0.0;
  int control_points = 0;           // 0 when multiscale is off
  double resample_deviation = 0.0;  // max |traj - spline(control points)|
};

struct TrainResult {
  Trajectory traj;
  TaskModelParams model;
  std::vector<EpochStats> history;
};

// Joint optimization of the trajectory and the reconstruction model:
// per batch, forward per channel -> (optional noise) -> adjoint per channel
// -> rss -> model -> l1 loss, plus the hinge constraint penalty on the
// trajectory; backpropagation reaches both the model parameters and the
// sample coordinates (through the control points when multiscale is active,
// with constraints always evaluated on the resampled trajectory).
// lr_traj == 0 freezes the trajectory at `init` exactly.
TrainResult train_joint(const Dataset& train, const Dataset& val, const Trajectory& init,
                        const TaskModelParams& model_init, const HardwareSpec& spec,
                        const OptimConfig& cfg);

// Greedy edge-joining tour: all pairwise distances ascending, an edge is
// accepted iff both endpoints have degree < 2 and no premature cycle forms.
// Returns an open-path permutation of 0..m-1; the points are never moved.
std::vector<int> tsp_greedy(const std::vector<Vec2>& points);

double path_length(const std::vector<Vec2>& points);
double path_length(const std::vector<Vec2>& points, const std::vector<int>& order);

struct TspPipelineConfig {
  OptimConfig base;
  int stage2_epochs = 60;
  int stage4_epochs = 60;
  bool keep_model = true;  // carry the stage-2 model into stage 4
};

struct TspPipelineResult {
  Trajectory cloud;        // stage-2 points in their original order
  std::vector<int> order;  // stage-3 reordering
  double length_before = 0.0;
  double length_after = 0.0;
  TrainResult final;  // stage-4 output; history spans stages 2 and 4
};

// Four stages: seeded Gaussian cloud; unconstrained joint learning
// (both penalty weights zero); greedy tour reordering; constrained
// fine-tuning.
TspPipelineResult train_tsp_pipeline(const Dataset& train, const Dataset& val,
                                     const HardwareSpec& spec, int m,
                                     const TspPipelineConfig& cfg);

// Iteratively rescales offending steps until the trajectory respects the
// limits within `tolerance`. No-op on feasible input.
Trajectory project_feasible(const Trajectory& traj, const HardwareSpec& spec, double tolerance,
                            int max_iterations = 400);

struct EvalResult {
  double psnr = 0.0;
  double ssim = 0.0;
};

// Mean reconstruction quality of (traj, model) over a dataset, optionally
// with noise injected at the given SNR.
EvalResult evaluate(const Dataset& data, const Trajectory& traj, const TaskModelParams& model,
                    const NufftConfig& cfg, std::optional<double> snr_db, uint64_t seed);

}  // namespace ktraj

#include "ktraj/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ktraj/generators.hpp"
#include "ktraj/rng.hpp"
#include "ktraj/spline.hpp"

namespace ktraj {

void AdamState::reset(size_t size) {
  m.assign(size, 0.0);
  v.assign(size, 0.0);
  step = 0;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

void OptimConfig::validate() const {
  if (lr_model < 0 || lr_traj < 0) throw std::invalid_argument("OptimConfig: negative rate");
  if (epochs < 1) throw std::invalid_argument("OptimConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("OptimConfig: batch size must be >= 1");
  if (multiscale) {
    if (multiscale->initial_control_points < 2) {
      throw std::invalid_argument("OptimConfig: need at least 2 control points");
    }
    if (multiscale->doubling_period < 1) {
      throw std::invalid_argument("OptimConfig: doubling period must be >= 1");
    }
  }
  nufft.validate();
}

namespace {

// Task-loss value plus gradients for one image at the current trajectory.
struct ImagePass {
  double loss = 0.0;
  std::vector<double> grad_model;
  std::vector<Vec2> grad_coords;
};

ImagePass image_pass(const NufftPlan& plan, const Trajectory& traj, const TaskModelParams& model,
                     const TrainingSample& sample, std::optional<double> snr_db,
                     uint64_t noise_seed, bool want_coord_grad) {
  const size_t channels = sample.channels.size();
  std::vector<KSpaceSamples> meas(channels);
  MultiChannelImage regridded(channels);
  for (size_t c = 0; c < channels; ++c) {
    meas[c] = plan.forward(sample.channels[c], traj);
    if (snr_db) meas[c] = add_noise(meas[c], *snr_db, mix_seed(noise_seed, c));
    regridded[c] = plan.adjoint(meas[c], traj);
  }
  const RealImage combined = rss(regridded);
  auto [output, cache] = model_forward(model, combined);
  const LossResult loss = l1_loss(output, sample.target);

  ImagePass pass;
  pass.loss = loss.value;
  ModelGrads mg = model_backward(model, cache, loss.grad);
  pass.grad_model = std::move(mg.params);
  if (want_coord_grad) {
    pass.grad_coords.assign(traj.points().size(), Vec2{});
    const MultiChannelImage grad_channels = rss_backward(regridded, combined, mg.input);
    for (size_t c = 0; c < channels; ++c) {
      const auto g_adj = plan.adjoint_grad_k(meas[c], traj, grad_channels[c]);
      const KSpaceSamples grad_samples = plan.forward(grad_channels[c], traj);
      const auto g_fwd = plan.forward_grad_k(sample.channels[c], traj, grad_samples);
      for (size_t i = 0; i < pass.grad_coords.size(); ++i) {
        pass.grad_coords[i] += g_adj[i] + g_fwd[i];
      }
    }
  }
  return pass;
}

std::vector<Vec2> control_points_from(const Trajectory& traj, int shot, int count) {
  const int m = traj.samples_per_shot();
  std::vector<Vec2> cp(count);
  for (int j = 0; j < count; ++j) {
    const int idx = static_cast<int>(std::lround(
        static_cast<double>(j) * (m - 1) / (count - 1)));
    cp[j] = traj.at(shot, idx);
  }
  return cp;
}

}  // namespace

TrainResult train_joint(const Dataset& train, const Dataset& val, const Trajectory& init,
                        const TaskModelParams& model_init, const HardwareSpec& spec,
                        const OptimConfig& cfg) {
  cfg.validate();
  spec.validate();
  model_init.validate();
  if (train.empty()) throw std::invalid_argument("train_joint: empty dataset");
  if (init.grid_size() != spec.n) {
    throw std::invalid_argument("train_joint: trajectory grid does not match hardware spec");
  }

  const NufftPlan& plan = nufft_plan(spec.n, cfg.nufft);
  const int m = init.samples_per_shot();
  const int shots = init.shots();

  Trajectory traj = init;
  TaskModelParams model = model_init;
  std::vector<double> model_flat = model.flatten();
  AdamState adam_model;
  adam_model.reset(model_flat.size());
  AdamState adam_traj;

  const bool learn_traj = cfg.lr_traj > 0;
  const bool multiscale = learn_traj && cfg.multiscale.has_value();

  // Multiscale state: per-shot control points; the working trajectory is
  // always their spline resampling.
  int n_control = 0;
  std::vector<std::vector<Vec2>> ctrl(shots);
  double resample_dev = 0.0;
  auto rebuild_from_ctrl = [&]() {
    std::vector<Vec2> coords;
    coords.reserve(static_cast<size_t>(shots) * m);
    for (int s = 0; s < shots; ++s) {
      const auto pts = spline_resample(ctrl[s], m);
      coords.insert(coords.end(), pts.begin(), pts.end());
    }
    Trajectory next(shots, m, coords, init.dwell_time(), init.grid_size());
    resample_dev = 0.0;
    for (size_t i = 0; i < coords.size(); ++i) {
      resample_dev = std::max(resample_dev, (next.points()[i] - coords[i]).norm());
    }
    traj = std::move(next);
  };
  if (multiscale) {
    n_control = std::min(m, cfg.multiscale->initial_control_points);
    for (int s = 0; s < shots; ++s) ctrl[s] = control_points_from(init, s, n_control);
    rebuild_from_ctrl();
    adam_traj.reset(static_cast<size_t>(shots) * n_control * 2);
  } else if (learn_traj) {
    adam_traj.reset(traj.points().size() * 2);
  }

  const int n_train = static_cast<int>(train.size());
  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{traj, model, {}};
  result.history.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (multiscale) {
      const int target = static_cast<int>(std::min<long>(
          m, static_cast<long>(cfg.multiscale->initial_control_points)
                 << std::min(31, epoch / cfg.multiscale->doubling_period)));
      if (target != n_control) {
        for (int s = 0; s < shots; ++s) {
          SplineCurve curve(ctrl[s]);
          std::vector<Vec2> next(target);
          for (int j = 0; j < target; ++j) {
            next[j] = curve.eval(static_cast<double>(j) * (n_control - 1) / (target - 1));
          }
          ctrl[s] = std::move(next);
        }
        n_control = target;
        rebuild_from_ctrl();
        adam_traj.reset(static_cast<size_t>(shots) * n_control * 2);
      }
    }

    Rng shuffle_rng(mix_seed(cfg.seed, 0x51ull, epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    int batch_count = 0;
    for (int start = 0; start < n_train; start += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n_train - start);
      std::vector<ImagePass> passes(count);
#pragma omp parallel for schedule(dynamic, 1)
      for (int b = 0; b < count; ++b) {
        const int idx = order[start + b];
        passes[b] = image_pass(plan, traj, model, train[idx], cfg.snr_db,
                               mix_seed(cfg.seed, 0x6e, epoch, idx), learn_traj);
      }

      // Fixed-order reduction over the batch.
      std::vector<double> grad_model(model_flat.size(), 0.0);
      std::vector<Vec2> grad_coords(learn_traj ? traj.points().size() : 0, Vec2{});
      double task_loss = 0.0;
      for (int b = 0; b < count; ++b) {
        task_loss += passes[b].loss;
        for (size_t i = 0; i < grad_model.size(); ++i) grad_model[i] += passes[b].grad_model[i];
        if (learn_traj) {
          for (size_t i = 0; i < grad_coords.size(); ++i) {
            grad_coords[i] += passes[b].grad_coords[i];
          }
        }
      }
      const double inv = 1.0 / count;
      task_loss *= inv;
      for (double& g : grad_model) g *= inv;
      for (Vec2& g : grad_coords) g = g * inv;

      const PenaltyResult penalty =
          constraint_penalty(traj, spec, cfg.lambda_v, cfg.lambda_a);
      const double batch_loss = task_loss + penalty.value;
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "train_joint: non-finite loss at epoch " << epoch << " batch " << batch_count;
        throw numeric_error(msg.str());
      }

      adam_step(adam_model, model_flat, grad_model, cfg.lr_model);
      model.unflatten(model_flat);

      if (learn_traj) {
        for (size_t i = 0; i < grad_coords.size(); ++i) grad_coords[i] += penalty.grad[i];
        if (multiscale) {
          std::vector<double> flat_ctrl(static_cast<size_t>(shots) * n_control * 2);
          std::vector<double> flat_grad(flat_ctrl.size());
          for (int s = 0; s < shots; ++s) {
            std::vector<Vec2> up(grad_coords.begin() + static_cast<size_t>(s) * m,
                                 grad_coords.begin() + static_cast<size_t>(s + 1) * m);
            const auto g_cp = spline_resample_grad(ctrl[s], m, up);
            for (int j = 0; j < n_control; ++j) {
              const size_t base = (static_cast<size_t>(s) * n_control + j) * 2;
              flat_ctrl[base] = ctrl[s][j].x;
              flat_ctrl[base + 1] = ctrl[s][j].y;
              flat_grad[base] = g_cp[j].x;
              flat_grad[base + 1] = g_cp[j].y;
            }
          }
          adam_step(adam_traj, flat_ctrl, flat_grad, cfg.lr_traj);
          const double half = spec.n / 2.0;
          for (int s = 0; s < shots; ++s) {
            for (int j = 0; j < n_control; ++j) {
              const size_t base = (static_cast<size_t>(s) * n_control + j) * 2;
              ctrl[s][j].x = std::clamp(flat_ctrl[base], -half, half);
              ctrl[s][j].y = std::clamp(flat_ctrl[base + 1], -half, half);
            }
          }
          rebuild_from_ctrl();
        } else {
          std::vector<double> flat(traj.points().size() * 2);
          std::vector<double> flat_grad(flat.size());
          for (size_t i = 0; i < traj.points().size(); ++i) {
            flat[2 * i] = traj.points()[i].x;
            flat[2 * i + 1] = traj.points()[i].y;
            flat_grad[2 * i] = grad_coords[i].x;
            flat_grad[2 * i + 1] = grad_coords[i].y;
          }
          adam_step(adam_traj, flat, flat_grad, cfg.lr_traj);
          for (size_t i = 0; i < traj.points().size(); ++i) {
            traj.points()[i] = {flat[2 * i], flat[2 * i + 1]};
          }
          traj.clamp_to_grid();
        }
      }

      epoch_loss += batch_loss;
      ++batch_count;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = epoch_loss / batch_count;
    stats.control_points = multiscale ? n_control : 0;
    stats.resample_deviation = multiscale ? resample_dev : 0.0;
    const FeasibilityReport rep = feasibility_report(traj, spec, 0.0);
    stats.max_violation = std::max(rep.max_velocity_violation, rep.max_acceleration_violation);
    if (!val.empty()) {
      const EvalResult ev =
          evaluate(val, traj, model, cfg.nufft, cfg.snr_db, mix_seed(cfg.seed, 0xe7a1ull));
      stats.psnr = ev.psnr;
      stats.ssim = ev.ssim;
    } else {
      stats.psnr = std::numeric_limits<double>::quiet_NaN();
      stats.ssim = std::numeric_limits<double>::quiet_NaN();
    }
    result.history.push_back(stats);
  }

  if (learn_traj && cfg.project_output) {
    const FeasibilityReport rep = feasibility_report(traj, spec, cfg.output_tolerance);
    if (!rep.feasible) traj = project_feasible(traj, spec, cfg.output_tolerance);
  }

  result.traj = traj;
  result.model = model;
  return result;
}

TspPipelineResult train_tsp_pipeline(const Dataset& train, const Dataset& val,
                                     const HardwareSpec& spec, int m,
                                     const TspPipelineConfig& cfg) {
  cfg.base.validate();
  spec.validate();

  // Stage 1: unordered Gaussian cloud.
  Trajectory cloud = gaussian_init(spec.n, m, cfg.base.seed, spec.dt);

  // Stage 2: unconstrained joint learning; the solution is independent of the
  // sample ordering, so multiscale is off and the penalty weights are zero.
  OptimConfig cfg2 = cfg.base;
  cfg2.lambda_v = 0.0;
  cfg2.lambda_a = 0.0;
  cfg2.epochs = cfg.stage2_epochs;
  cfg2.multiscale.reset();
  cfg2.project_output = false;
  TrainResult s2 = train_joint(train, val, cloud, TaskModelParams::make_default(cfg.base.seed),
                               spec, cfg2);

  const double length_before = path_length(s2.traj.points());

  // Stage 3: reorder, never move, the learned points.
  std::vector<int> order = tsp_greedy(s2.traj.points());
  std::vector<Vec2> reordered(s2.traj.points().size());
  for (size_t i = 0; i < order.size(); ++i) reordered[i] = s2.traj.points()[order[i]];
  const double length_after = path_length(reordered);
  Trajectory stage3(1, m, std::move(reordered), spec.dt, spec.n);

  // Stage 4: constrained fine-tuning.
  OptimConfig cfg4 = cfg.base;
  cfg4.epochs = cfg.stage4_epochs;
  cfg4.multiscale.reset();
  TrainResult s4 = train_joint(train, val, stage3,
                               cfg.keep_model ? s2.model : TaskModelParams::make_default(
                                                               mix_seed(cfg.base.seed, 4)),
                               spec, cfg4);

  std::vector<EpochStats> history;
  history.reserve(s2.history.size() + s4.history.size());
  for (EpochStats e : s2.history) {
    e.stage = 2;
    history.push_back(e);
  }
  const int offset = static_cast<int>(s2.history.size());
  for (EpochStats e : s4.history) {
    e.stage = 4;
    e.epoch += offset;
    history.push_back(e);
  }
  s4.history = std::move(history);
  return {std::move(s2.traj), std::move(order), length_before, length_after, std::move(s4)};
}

Trajectory project_feasible(const Trajectory& traj, const HardwareSpec& spec, double tolerance,
                            int max_iterations) {
  const double v_max = spec.v_max_grid();
  const double a_max = spec.a_max_grid();
  const int m = traj.samples_per_shot();
  Trajectory out = traj;
  for (int s = 0; s < out.shots(); ++s) {
    for (int iter = 0; iter < max_iterations; ++iter) {
      double worst = 0.0;
      for (int i = 0; i + 1 < m; ++i) {
        worst = std::max(worst, (out.at(s, i + 1) - out.at(s, i)).norm() - v_max);
      }
      for (int i = 0; i + 2 < m; ++i) {
        const Vec2 a = out.at(s, i + 2) - 2.0 * out.at(s, i + 1) + out.at(s, i);
        worst = std::max(worst, a.norm() - a_max);
      }
      if (worst <= 0.9 * tolerance) break;

      std::vector<Vec2> steps(m - 1);
      for (int i = 0; i + 1 < m; ++i) steps[i] = out.at(s, i + 1) - out.at(s, i);
      for (Vec2& v : steps) {
        const double nv = v.norm();
        if (nv > v_max) v = v * (v_max / nv);
      }
      for (int i = 1; i < m - 1; ++i) {
        const Vec2 a = steps[i] - steps[i - 1];
        const double na = a.norm();
        if (na > a_max) {
          steps[i] = steps[i - 1] + a * (a_max / na);
          const double nv = steps[i].norm();
          if (nv > v_max) steps[i] = steps[i] * (v_max / nv);
        }
      }
      Vec2 p = out.at(s, 0);
      for (int i = 0; i + 1 < m; ++i) {
        p += steps[i];
        out.at(s, i + 1) = p;
      }
      out.clamp_to_grid();
    }
  }
  return out;
}

EvalResult evaluate(const Dataset& data, const Trajectory& traj, const TaskModelParams& model,
                    const NufftConfig& cfg, std::optional<double> snr_db, uint64_t seed) {
  if (data.empty()) return {};
  const NufftPlan& plan = nufft_plan(traj.grid_size(), cfg);
  const int count = static_cast<int>(data.size());
  std::vector<double> psnrs(count), ssims(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    const TrainingSample& sample = data[i];
    MultiChannelImage regridded(sample.channels.size());
    for (size_t c = 0; c < sample.channels.size(); ++c) {
      KSpaceSamples meas = plan.forward(sample.channels[c], traj);
      if (snr_db) meas = add_noise(meas, *snr_db, mix_seed(seed, i, c));
      regridded[c] = plan.adjoint(meas, traj);
    }
    const auto output = model_forward(model, rss(regridded)).first;
    psnrs[i] = psnr(output, sample.target);
    ssims[i] = ssim(output, sample.target);
  }
  EvalResult res;
  for (int i = 0; i < count; ++i) {
    res.psnr += psnrs[i];
    res.ssim += ssims[i];
  }
  res.psnr /= count;
  res.ssim /= count;
  return res;
}

}  // namespace ktraj

// Command-line driver: trajectory generation, feasibility checking, joint
// trajectory/model optimization, reconstruction, and waveform export.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ktraj/dataio.hpp"
#include "ktraj/generators.hpp"
#include "ktraj/optimizer.hpp"
#include "ktraj/rng.hpp"
#include "ktraj/svg.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using ktraj::Dataset;
using ktraj::HardwareSpec;
using ktraj::Trajectory;
using ordered_json = nlohmann::ordered_json;

// Values from a JSON config file seed the bound variables before parsing, so
// command-line flags always win.
struct ConfigMap {
  ordered_json j = ordered_json::object();

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ktraj::io_error("cannot open config " + path);
    in >> j;
  }
  template <typename T>
  void apply(const std::string& key, T& value) const {
    if (j.contains(key)) value = j.at(key).get<T>();
  }
};

struct HardwareFlags {
  double gmax = 40.0;
  double smax = 200.0;
  double dt = 1e-5;
  double fov = 0.2;
  double gamma = 42.576e6;
  int n = 64;

  void add_options(CLI::App* cmd, const ConfigMap& cfg, bool with_n) {
    apply_config(cfg, with_n);
    cmd->add_option("--gmax", gmax, "peak gradient, mT/m");
    cmd->add_option("--smax", smax, "max slew rate, T/m/s");
    cmd->add_option("--dt", dt, "dwell time, s");
    cmd->add_option("--fov", fov, "field of view, m");
    cmd->add_option("--gamma", gamma, "gyromagnetic ratio, Hz/T");
    if (with_n) cmd->add_option("--n", n, "grid size, pixels per side");
  }
  void apply_config(const ConfigMap& cfg, bool with_n) {
    cfg.apply("gmax", gmax);
    cfg.apply("smax", smax);
    cfg.apply("dt", dt);
    cfg.apply("fov", fov);
    cfg.apply("gamma", gamma);
    if (with_n) cfg.apply("n", n);
  }
  HardwareSpec spec() const { return {gmax, smax, dt, gamma, fov, n}; }
};

void write_history_csv(const std::string& path, const std::vector<ktraj::EpochStats>& history,
                       bool with_stage) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ktraj::io_error("cannot write " + path);
  out << (with_stage ? "epoch,stage,loss,psnr,ssim,max_violation\n"
                     : "epoch,loss,psnr,ssim,max_violation\n");
  char line[256];
  for (const auto& e : history) {
    if (with_stage) {
      std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.stage,
                    e.loss, e.psnr, e.ssim, e.max_violation);
    } else {
      std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.loss, e.psnr,
                    e.ssim, e.max_violation);
    }
    out << line;
  }
}

void write_manifest(const std::string& path, const std::string& command,
                    const ordered_json& config, uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double wall_seconds) {
  ordered_json j;
  j["tool"] = "ktraj";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_time_seconds"] = wall_seconds;
  j["threads"] = omp_get_max_threads();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ktraj::io_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"k-space trajectory learning toolkit"};
  app.require_subcommand(1);

  // Config file pre-pass; flags given on the command line override it.
  ConfigMap cfg;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") cfg.load(argv[i + 1]);
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON file supplying any flag");

  int threads = 0;
  cfg.apply("threads", threads);
  app.add_option("--threads", threads, "OpenMP thread count (0 = library default)");

  // ---- generate -------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "write a classical initial trajectory");
  std::string gen_kind = "spiral", gen_out = "trajectory.json";
  int gen_shots = 1, gen_samples = 3000;
  uint64_t gen_seed = 0;
  double gen_density = 1.5, gen_turns = 0.0;
  HardwareFlags gen_hw;
  cfg.apply("kind", gen_kind);
  cfg.apply("shots", gen_shots);
  cfg.apply("samples", gen_samples);
  cfg.apply("out", gen_out);
  cfg.apply("seed", gen_seed);
  cfg.apply("density-exponent", gen_density);
  cfg.apply("turns", gen_turns);
  gen->add_option("--kind", gen_kind, "spiral|radial|cartesian|gaussian")
      ->check(CLI::IsMember({"spiral", "radial", "cartesian", "gaussian"}));
  gen->add_option("--shots", gen_shots, "number of shots");
  gen->add_option("--samples", gen_samples, "samples per shot");
  gen->add_option("--out", gen_out, "output trajectory path")->required();
  gen->add_option("--seed", gen_seed, "seed for the gaussian cloud");
  gen->add_option("--density-exponent", gen_density, "spiral radial density exponent");
  gen->add_option("--turns", gen_turns, "spiral revolutions per shot (0 = auto)");
  gen_hw.add_options(gen, cfg, true);

  // ---- check ----------------------------------------------------------
  auto* chk = app.add_subcommand("check", "feasibility report for a trajectory file");
  std::string chk_traj;
  double chk_tol = 1e-6;
  HardwareFlags chk_hw;
  cfg.apply("tolerance", chk_tol);
  chk->add_option("--traj", chk_traj, "trajectory file")->required();
  chk->add_option("--tolerance", chk_tol, "violation tolerance, grid units");
  chk_hw.add_options(chk, cfg, false);

  // ---- optimize ---------------------------------------------------------
  auto* opt = app.add_subcommand("optimize", "joint trajectory/model training");
  std::string opt_init, opt_outdir = "run";
  uint64_t opt_dataset_seed = 0, opt_seed = 0;
  int opt_epochs = 100, opt_batch = 8, opt_train_count = 200, opt_val_count = 50, opt_coils = 4;
  double opt_lr_traj = 0.01, opt_lr_model = 0.001, opt_lambda_v = 0.1, opt_lambda_a = 0.1;
  double opt_snr_db = std::numeric_limits<double>::infinity();
  std::string opt_multiscale;
  bool opt_no_project = false;
  HardwareFlags opt_hw;
  cfg.apply("traj-init", opt_init);
  cfg.apply("dataset-seed", opt_dataset_seed);
  cfg.apply("seed", opt_seed);
  cfg.apply("epochs", opt_epochs);
  cfg.apply("batch", opt_batch);
  cfg.apply("train-count", opt_train_count);
  cfg.apply("val-count", opt_val_count);
  cfg.apply("coils", opt_coils);
  cfg.apply("lr-traj", opt_lr_traj);
  cfg.apply("lr-model", opt_lr_model);
  cfg.apply("lambda-v", opt_lambda_v);
  cfg.apply("lambda-a", opt_lambda_a);
  cfg.apply("snr-db", opt_snr_db);
  cfg.apply("multiscale", opt_multiscale);
  cfg.apply("out-dir", opt_outdir);
  opt->add_option("--traj-init", opt_init, "initial trajectory file")->required();
  opt->add_option("--dataset-seed", opt_dataset_seed, "phantom dataset seed");
  opt->add_option("--seed", opt_seed, "training seed (model init, shuffling, noise)");
  opt->add_option("--epochs", opt_epochs, "training epochs");
  opt->add_option("--batch", opt_batch, "batch size");
  opt->add_option("--train-count", opt_train_count, "training images");
  opt->add_option("--val-count", opt_val_count, "validation images");
  opt->add_option("--coils", opt_coils, "simulated coil count");
  opt->add_option("--lr-traj", opt_lr_traj, "trajectory learning rate");
  opt->add_option("--lr-model", opt_lr_model, "model learning rate");
  opt->add_option("--lambda-v", opt_lambda_v, "velocity penalty weight");
  opt->add_option("--lambda-a", opt_lambda_a, "acceleration penalty weight");
  opt->add_option("--snr-db", opt_snr_db, "measurement noise SNR in dB (inf = none)");
  opt->add_option("--multiscale", opt_multiscale, "control points schedule 'c0,period'");
  opt->add_flag("--no-project", opt_no_project, "skip the strict-export projection");
  opt->add_option("--out-dir", opt_outdir, "output directory")->required();
  opt_hw.add_options(opt, cfg, false);

  // ---- tsp-optimize ---------------------------------------------------
  auto* tsp = app.add_subcommand("tsp-optimize", "staged single-shot pipeline");
  std::string tsp_outdir = "tsp_run";
  int tsp_n = 64, tsp_samples = 512, tsp_stage2 = 60, tsp_stage4 = 60;
  int tsp_train_count = 40, tsp_val_count = 10, tsp_coils = 4, tsp_batch = 8;
  uint64_t tsp_dataset_seed = 0, tsp_seed = 0;
  double tsp_lr_traj = 0.01, tsp_lr_model = 0.001, tsp_lambda_v = 0.1, tsp_lambda_a = 0.1;
  HardwareFlags tsp_hw;
  cfg.apply("samples", tsp_samples);
  cfg.apply("stage2-epochs", tsp_stage2);
  cfg.apply("stage4-epochs", tsp_stage4);
  cfg.apply("dataset-seed", tsp_dataset_seed);
  cfg.apply("seed", tsp_seed);
  cfg.apply("out-dir", tsp_outdir);
  tsp->add_option("--n", tsp_n, "grid size");
  tsp->add_option("--samples", tsp_samples, "single-shot sample count");
  tsp->add_option("--dataset-seed", tsp_dataset_seed, "phantom dataset seed");
  tsp->add_option("--seed", tsp_seed, "training seed");
  tsp->add_option("--stage2-epochs", tsp_stage2, "unconstrained epochs");
  tsp->add_option("--stage4-epochs", tsp_stage4, "constrained fine-tune epochs");
  tsp->add_option("--train-count", tsp_train_count, "training images");
  tsp->add_option("--val-count", tsp_val_count, "validation images");
  tsp->add_option("--coils", tsp_coils, "simulated coil count");
  tsp->add_option("--batch", tsp_batch, "batch size");
  tsp->add_option("--lr-traj", tsp_lr_traj, "trajectory learning rate");
  tsp->add_option("--lr-model", tsp_lr_model, "model learning rate");
  tsp->add_option("--lambda-v", tsp_lambda_v, "velocity penalty weight");
  tsp->add_option("--lambda-a", tsp_lambda_a, "acceleration penalty weight");
  tsp->add_option("--out-dir", tsp_outdir, "output directory")->required();
  tsp_hw.add_options(tsp, cfg, false);

  // ---- reconstruct ------------------------------------------------------
  auto* rec = app.add_subcommand("reconstruct", "acquire along a trajectory and reconstruct");
  std::string rec_traj, rec_model, rec_image, rec_out = "recon.bin", rec_truth;
  int rec_coils = 4;
  uint64_t rec_coil_seed = 0;
  double rec_snr_db = std::numeric_limits<double>::infinity();
  rec->add_option("--traj", rec_traj, "trajectory file")->required();
  rec->add_option("--model", rec_model, "model parameter file")->required();
  rec->add_option("--image", rec_image, "fully sampled source image (raw + sidecar)")->required();
  rec->add_option("--out", rec_out, "reconstruction output path")->required();
  rec->add_option("--ground-truth", rec_truth, "compare against this image instead");
  rec->add_option("--coils", rec_coils, "simulated coil count");
  rec->add_option("--coil-seed", rec_coil_seed, "coil profile seed");
  rec->add_option("--snr-db", rec_snr_db, "measurement noise SNR in dB (inf = none)");

  // ---- export-waveform --------------------------------------------------
  auto* exp = app.add_subcommand("export-waveform", "gradient/slew CSV for a trajectory");
  std::string exp_traj, exp_out = "waveform.csv";
  HardwareFlags exp_hw;
  exp->add_option("--traj", exp_traj, "trajectory file")->required();
  exp->add_option("--out", exp_out, "output CSV path")->required();
  exp_hw.add_options(exp, cfg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  if (gen->parsed()) {
    HardwareSpec spec = gen_hw.spec();
    ktraj::GeneratorResult result = [&]() -> ktraj::GeneratorResult {
      if (gen_kind == "spiral") {
        return ktraj::spiral(spec, gen_shots, gen_samples, {gen_density, gen_turns});
      }
      if (gen_kind == "radial") return ktraj::radial(spec, gen_shots, gen_samples);
      if (gen_kind == "cartesian") return ktraj::cartesian(spec, gen_shots, gen_samples);
      return {ktraj::gaussian_init(spec.n, gen_samples, gen_seed, spec.dt), true};
    }();
    ktraj::save_trajectory(gen_out, result.traj, spec.fov, spec.gamma);
    const auto rep = ktraj::feasibility_report(result.traj, spec, 1e-6);
    std::cout << ktraj::report_to_json(rep) << "\n";
    if (!result.coverage_complete) std::cout << "coverage incomplete\n";
    return 0;
  }

  if (chk->parsed()) {
    const ktraj::TrajectoryFile tf = ktraj::load_trajectory(chk_traj);
    HardwareSpec spec = chk_hw.spec();
    spec.n = tf.traj.grid_size();
    spec.dt = tf.traj.dwell_time();
    if (!chk->count("--fov")) spec.fov = tf.fov;
    if (!chk->count("--gamma")) spec.gamma = tf.gamma;
    const auto rep = ktraj::feasibility_report(tf.traj, spec, chk_tol);
    std::cout << ktraj::report_to_json(rep) << "\n";
    return rep.feasible ? 0 : 1;
  }

  if (opt->parsed()) {
    const auto t0 = std::chrono::steady_clock::now();
    const ktraj::TrajectoryFile tf = ktraj::load_trajectory(opt_init);
    HardwareSpec spec = opt_hw.spec();
    spec.n = tf.traj.grid_size();
    spec.dt = tf.traj.dwell_time();
    if (!opt->count("--fov")) spec.fov = tf.fov;
    if (!opt->count("--gamma")) spec.gamma = tf.gamma;

    ktraj::DatasetSpec dspec{spec.n, opt_coils, opt_train_count, opt_val_count, opt_dataset_seed};
    auto [train, val] = ktraj::make_phantom_dataset(dspec);

    ktraj::OptimConfig ocfg;
    ocfg.lr_model = opt_lr_model;
    ocfg.lr_traj = opt_lr_traj;
    ocfg.lambda_v = opt_lambda_v;
    ocfg.lambda_a = opt_lambda_a;
    ocfg.epochs = opt_epochs;
    ocfg.batch_size = opt_batch;
    ocfg.seed = opt_seed;
    ocfg.project_output = !opt_no_project;
    if (std::isfinite(opt_snr_db)) ocfg.snr_db = opt_snr_db;
    if (!opt_multiscale.empty()) {
      ktraj::MultiscaleSchedule ms;
      if (std::sscanf(opt_multiscale.c_str(), "%d,%d", &ms.initial_control_points,
                      &ms.doubling_period) != 2) {
        throw std::invalid_argument("--multiscale expects 'c0,period'");
      }
      ocfg.multiscale = ms;
    }

    const auto result = ktraj::train_joint(train, val, tf.traj,
                                           ktraj::TaskModelParams::make_default(opt_seed), spec,
                                           ocfg);

    std::filesystem::create_directories(opt_outdir);
    const std::string traj_path = opt_outdir + "/trajectory.json";
    const std::string model_path = opt_outdir + "/model.bin";
    const std::string hist_path = opt_outdir + "/history.csv";
    const std::string svg_path = opt_outdir + "/trajectory.svg";
    const std::string report_path = opt_outdir + "/report.json";
    ktraj::save_trajectory(traj_path, result.traj, spec.fov, spec.gamma);
    ktraj::save_model(model_path, result.model);
    write_history_csv(hist_path, result.history, false);
    ktraj::save_trajectory_svg(svg_path, result.traj, spec);
    const auto rep = ktraj::feasibility_report(result.traj, spec, 1e-2);
    const auto& last = result.history.back();
    ktraj::save_report_json(report_path, rep, last.psnr, last.ssim);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
    ordered_json snap;
    snap["traj-init"] = opt_init;
    snap["dataset-seed"] = opt_dataset_seed;
    snap["seed"] = opt_seed;
    snap["epochs"] = opt_epochs;
    snap["batch"] = opt_batch;
    snap["train-count"] = opt_train_count;
    snap["val-count"] = opt_val_count;
    snap["coils"] = opt_coils;
    snap["lr-traj"] = opt_lr_traj;
    snap["lr-model"] = opt_lr_model;
    snap["lambda-v"] = opt_lambda_v;
    snap["lambda-a"] = opt_lambda_a;
    snap["snr-db"] = std::isfinite(opt_snr_db) ? ordered_json(opt_snr_db) : ordered_json("inf");
    snap["multiscale"] = opt_multiscale;
    snap["project"] = !opt_no_project;
    snap["gmax"] = spec.g_max;
    snap["smax"] = spec.s_max;
    write_manifest(opt_outdir + "/manifest.json", "optimize", snap, opt_seed, {opt_init},
                   {traj_path, model_path, hist_path, svg_path, report_path}, wall);
    std::printf("final: loss=%.6g psnr=%.3f ssim=%.4f max_violation=%.3g feasible=%d\n",
                last.loss, last.psnr, last.ssim,
                std::max(rep.max_velocity_violation, rep.max_acceleration_violation),
                rep.feasible ? 1 : 0);
    return 0;
  }

  if (tsp->parsed()) {
    const auto t0 = std::chrono::steady_clock::now();
    HardwareSpec spec = tsp_hw.spec();
    spec.n = tsp_n;

    ktraj::DatasetSpec dspec{spec.n, tsp_coils, tsp_train_count, tsp_val_count, tsp_dataset_seed};
    auto [train, val] = ktraj::make_phantom_dataset(dspec);

    ktraj::TspPipelineConfig pcfg;
    pcfg.base.lr_model = tsp_lr_model;
    pcfg.base.lr_traj = tsp_lr_traj;
    pcfg.base.lambda_v = tsp_lambda_v;
    pcfg.base.lambda_a = tsp_lambda_a;
    pcfg.base.batch_size = tsp_batch;
    pcfg.base.seed = tsp_seed;
    pcfg.stage2_epochs = tsp_stage2;
    pcfg.stage4_epochs = tsp_stage4;

    const auto result = ktraj::train_tsp_pipeline(train, val, spec, tsp_samples, pcfg);

    std::filesystem::create_directories(tsp_outdir);
    const std::string cloud_path = tsp_outdir + "/stage2_cloud.json";
    const std::string path_path = tsp_outdir + "/stage3_path.json";
    const std::string traj_path = tsp_outdir + "/trajectory.json";
    const std::string model_path = tsp_outdir + "/model.bin";
    const std::string hist_path = tsp_outdir + "/history.csv";
    const std::string svg_path = tsp_outdir + "/trajectory.svg";
    const std::string report_path = tsp_outdir + "/report.json";
    ktraj::save_trajectory(cloud_path, result.cloud, spec.fov, spec.gamma);
    std::vector<ktraj::Vec2> reordered(result.cloud.points().size());
    for (size_t i = 0; i < result.order.size(); ++i) {
      reordered[i] = result.cloud.points()[result.order[i]];
    }
    ktraj::save_trajectory(path_path,
                           Trajectory(1, tsp_samples, reordered, spec.dt, spec.n), spec.fov,
                           spec.gamma);
    ktraj::save_trajectory(traj_path, result.final.traj, spec.fov, spec.gamma);
    ktraj::save_model(model_path, result.final.model);
    write_history_csv(hist_path, result.final.history, true);
    ktraj::save_trajectory_svg(svg_path, result.final.traj, spec);
    const auto rep = ktraj::feasibility_report(result.final.traj, spec, 1e-2);
    const auto& last = result.final.history.back();
    ktraj::save_report_json(report_path, rep, last.psnr, last.ssim);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
    ordered_json snap;
    snap["n"] = tsp_n;
    snap["samples"] = tsp_samples;
    snap["dataset-seed"] = tsp_dataset_seed;
    snap["seed"] = tsp_seed;
    snap["stage2-epochs"] = tsp_stage2;
    snap["stage4-epochs"] = tsp_stage4;
    snap["train-count"] = tsp_train_count;
    snap["val-count"] = tsp_val_count;
    snap["coils"] = tsp_coils;
    snap["lr-traj"] = tsp_lr_traj;
    snap["lr-model"] = tsp_lr_model;
    snap["path_length_before"] = result.length_before;
    snap["path_length_after"] = result.length_after;
    write_manifest(tsp_outdir + "/manifest.json", "tsp-optimize", snap, tsp_seed, {},
                   {cloud_path, path_path, traj_path, model_path, hist_path, svg_path,
                    report_path},
                   wall);
    std::printf("path length: stage2=%.3f stage3=%.3f\n", result.length_before,
                result.length_after);
    std::printf("final: psnr=%.3f max_violation=%.3g feasible=%d\n", last.psnr,
                std::max(rep.max_velocity_violation, rep.max_acceleration_violation),
                rep.feasible ? 1 : 0);
    return 0;
  }

  if (rec->parsed()) {
    const ktraj::TrajectoryFile tf = ktraj::load_trajectory(rec_traj);
    const auto model = ktraj::load_model(rec_model);
    const ktraj::RealImage image = ktraj::load_image(rec_image);
    if (image.n != tf.traj.grid_size()) {
      throw ktraj::io_error("image size does not match trajectory grid");
    }
    const auto sens = ktraj::coil_sensitivities(image.n, rec_coils, rec_coil_seed);
    const ktraj::TrainingSample sample = ktraj::simulate_multichannel(image, sens);

    ktraj::NufftConfig ncfg;
    ktraj::MultiChannelImage regridded(sample.channels.size());
    for (size_t c = 0; c < sample.channels.size(); ++c) {
      ktraj::KSpaceSamples meas = ktraj::nufft_forward(sample.channels[c], tf.traj, ncfg);
      if (std::isfinite(rec_snr_db)) {
        meas = ktraj::add_noise(meas, rec_snr_db, ktraj::mix_seed(rec_coil_seed, c));
      }
      regridded[c] = ktraj::nufft_adjoint(meas, tf.traj, ncfg, image.n);
    }
    const auto recon = ktraj::model_forward(model, ktraj::rss(regridded)).first;
    ktraj::save_image(rec_out, recon);

    const ktraj::RealImage& truth =
        rec_truth.empty() ? sample.target : ktraj::load_image(rec_truth);
    std::printf("psnr=%.4f ssim=%.5f\n", ktraj::psnr(recon, truth), ktraj::ssim(recon, truth));
    return 0;
  }

  if (exp->parsed()) {
    const ktraj::TrajectoryFile tf = ktraj::load_trajectory(exp_traj);
    HardwareSpec spec = exp_hw.spec();
    spec.n = tf.traj.grid_size();
    spec.dt = tf.traj.dwell_time();
    if (!exp->count("--fov")) spec.fov = tf.fov;
    if (!exp->count("--gamma")) spec.gamma = tf.gamma;
    ktraj::save_waveforms_csv(exp_out, ktraj::to_waveforms(tf.traj, spec));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ktraj::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const ktraj::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}

#include "ktraj/dataio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "ktraj/rng.hpp"

namespace ktraj {

using ordered_json = nlohmann::ordered_json;

const std::vector<Ellipse>& shepp_logan_ellipses() {
  // intensity, a, b, x0, y0, phi
  static const std::vector<Ellipse> table = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},  {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},     {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},   {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0}, {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  return table;
}

RealImage ellipse_phantom(int n, const std::vector<Ellipse>& ellipses) {
  RealImage img(n);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < n; ++iy) {
    // Pixel centers, y up so the phantom is oriented the usual way.
    const double y = (n - 1 - 2.0 * iy) / n;
    for (int ix = 0; ix < n; ++ix) {
      const double x = (2.0 * ix - n + 1) / n;
      double val = 0.0;
      for (const Ellipse& e : ellipses) {
        const double c = std::cos(e.phi_deg * M_PI / 180.0);
        const double s = std::sin(e.phi_deg * M_PI / 180.0);
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double u = (c * dx + s * dy) / e.a;
        const double v = (-s * dx + c * dy) / e.b;
        if (u * u + v * v <= 1.0) val += e.intensity;
      }
      img.at(iy, ix) = val;
    }
  }
  return img;
}

RealImage shepp_logan(int n) { return ellipse_phantom(n, shepp_logan_ellipses()); }

MultiChannelImage coil_sensitivities(int n, int l, uint64_t seed) {
  if (l < 1) throw std::invalid_argument("coil_sensitivities: need at least one coil");
  Rng rng(mix_seed(seed, 0xc011ull));
  const double ring = 0.6 * n / 2.0;
  const double width = 0.45 * n;

  MultiChannelImage sens(l, ComplexImage(n));
  std::vector<double> phase_x(l), phase_y(l);
  for (int c = 0; c < l; ++c) {
    phase_x[c] = rng.uniform(-1.0, 1.0);
    phase_y[c] = rng.uniform(-1.0, 1.0);
  }
  for (int c = 0; c < l; ++c) {
    const double angle = 2.0 * M_PI * c / l;
    const double cx = ring * std::cos(angle);
    const double cy = ring * std::sin(angle);
    for (int iy = 0; iy < n; ++iy) {
      const double y = iy - n / 2.0 + 0.5;
      for (int ix = 0; ix < n; ++ix) {
        const double x = ix - n / 2.0 + 0.5;
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double mag = std::exp(-d2 / (2.0 * width * width));
        const double ph = 2.0 * M_PI * (phase_x[c] * x + phase_y[c] * y) / n;
        sens[c].at(iy, ix) = mag * cplx{std::cos(ph), std::sin(ph)};
      }
    }
  }
  // Pixelwise sum of squared moduli = 1.
  const size_t pixels = static_cast<size_t>(n) * n;
  for (size_t i = 0; i < pixels; ++i) {
    double total = 0.0;
    for (int c = 0; c < l; ++c) total += std::norm(sens[c].v[i]);
    const double inv = 1.0 / std::sqrt(total);
    for (int c = 0; c < l; ++c) sens[c].v[i] *= inv;
  }
  return sens;
}

TrainingSample simulate_multichannel(const RealImage& image, const MultiChannelImage& sens) {
  if (sens.empty() || sens[0].n != image.n) {
    throw std::invalid_argument("simulate_multichannel: size mismatch");
  }
  TrainingSample sample;
  sample.channels.reserve(sens.size());
  for (const ComplexImage& s : sens) {
    ComplexImage ch(image.n);
    for (size_t i = 0; i < ch.v.size(); ++i) ch.v[i] = image.v[i] * s.v[i];
    sample.channels.push_back(std::move(ch));
  }
  sample.target = rss(sample.channels);
  return sample;
}

std::pair<Dataset, Dataset> make_phantom_dataset(const DatasetSpec& spec) {
  const MultiChannelImage sens = coil_sensitivities(spec.n, spec.coils, spec.seed);
  const int total = spec.train_count + spec.val_count;
  Dataset all(total);

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < total; ++i) {
    Rng rng(mix_seed(spec.seed, 0xda7aull, i));
    const double rot = rng.uniform(-15.0, 15.0);
    const double dx = rng.uniform(-0.1, 0.1);
    const double dy = rng.uniform(-0.1, 0.1);
    const double gain = rng.uniform(0.9, 1.1);
    const double c = std::cos(rot * M_PI / 180.0);
    const double s = std::sin(rot * M_PI / 180.0);

    std::vector<Ellipse> table = shepp_logan_ellipses();
    for (Ellipse& e : table) {
      const double x = c * e.x0 - s * e.y0 + dx;
      const double y = s * e.x0 + c * e.y0 + dy;
      e.x0 = x;
      e.y0 = y;
      e.phi_deg += rot;
      e.intensity *= gain * (1.0 + 0.05 * rng.uniform(-1.0, 1.0));
    }
    all[i] = simulate_multichannel(ellipse_phantom(spec.n, table), sens);
  }

  Dataset train(all.begin(), all.begin() + spec.train_count);
  Dataset val(all.begin() + spec.train_count, all.end());
  return {std::move(train), std::move(val)};
}

// --- serialization ----------------------------------------------------------

namespace {

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << text;
  if (!out) throw io_error("write failed for " + path);
}

void write_raw_f32(const std::string& path, const std::vector<double>& values) {
  std::vector<float> buf(values.begin(), values.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw io_error("write failed for " + path);
}

std::vector<double> read_raw_f32(const std::string& path, size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::vector<float> buf(expected);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(expected * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != expected * sizeof(float)) {
    throw io_error("short read in " + path);
  }
  return {buf.begin(), buf.end()};
}

}  // namespace

void save_trajectory(const std::string& path, const Trajectory& traj, double fov, double gamma) {
  ordered_json j;
  j["schema_version"] = 1;
  j["n"] = traj.grid_size();
  j["fov"] = fov;
  j["dt"] = traj.dwell_time();
  j["gamma"] = gamma;
  j["n_shots"] = traj.shots();
  j["m"] = traj.samples_per_shot();
  std::vector<double> coords;
  coords.reserve(traj.points().size() * 2);
  for (const Vec2& p : traj.points()) {
    coords.push_back(p.x);
    coords.push_back(p.y);
  }
  j["coords"] = coords;
  write_text_file(path, j.dump(2) + "\n");
}

TrajectoryFile load_trajectory(const std::string& path) {
  const ordered_json j = read_json_file(path);
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != 1) {
    throw io_error("unsupported trajectory schema in " + path);
  }
  try {
    const int n = j.at("n").get<int>();
    const double fov = j.at("fov").get<double>();
    const double dt = j.at("dt").get<double>();
    const double gamma = j.at("gamma").get<double>();
    const int shots = j.at("n_shots").get<int>();
    const int m = j.at("m").get<int>();
    const auto coords = j.at("coords").get<std::vector<double>>();
    if (coords.size() != static_cast<size_t>(shots) * m * 2) {
      throw io_error("coordinate count mismatch in " + path);
    }
    std::vector<Vec2> pts(coords.size() / 2);
    for (size_t i = 0; i < pts.size(); ++i) pts[i] = {coords[2 * i], coords[2 * i + 1]};
    return {1, fov, gamma, Trajectory(shots, m, std::move(pts), dt, n)};
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed trajectory file " + path + ": " + e.what());
  }
}

void save_waveforms_csv(const std::string& path, const Waveforms& wf) {
  std::string text = "shot,sample,Gx_mT_per_m,Gy_mT_per_m,Sx_T_per_m_s,Sy_T_per_m_s\n";
  char line[256];
  for (int s = 0; s < wf.shots; ++s) {
    const auto& g = wf.gradient_mT_m[s];
    const auto& sl = wf.slew_T_m_s[s];
    for (size_t i = 0; i < g.size(); ++i) {
      // The slew column has one fewer entry; the final row is padded with 0.
      const Vec2 slew = i < sl.size() ? sl[i] : Vec2{0.0, 0.0};
      std::snprintf(line, sizeof(line), "%d,%zu,%.17g,%.17g,%.17g,%.17g\n", s, i, g[i].x, g[i].y,
                    slew.x, slew.y);
      text += line;
    }
  }
  write_text_file(path, text);
}

void save_image(const std::string& path, const RealImage& image) {
  ordered_json side;
  side["shape"] = {image.n, image.n};
  side["dtype"] = "float32";
  side["order"] = "row-major";
  write_text_file(path + ".json", side.dump(2) + "\n");
  write_raw_f32(path, image.v);
}

RealImage load_image(const std::string& path) {
  const ordered_json side = read_json_file(path + ".json");
  try {
    const auto shape = side.at("shape").get<std::vector<int>>();
    if (shape.size() != 2 || shape[0] != shape[1]) throw io_error("non-square image " + path);
    if (side.at("dtype").get<std::string>() != "float32") {
      throw io_error("unsupported dtype in " + path);
    }
    RealImage img(shape[0]);
    img.v = read_raw_f32(path, img.v.size());
    return img;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed image sidecar for " + path + ": " + e.what());
  }
}

void save_model(const std::string& path, const TaskModelParams& params) {
  params.validate();
  ordered_json side;
  side["dtype"] = "float32";
  side["layers"] = ordered_json::array();
  for (const ConvLayer& l : params.layers) {
    side["layers"].push_back({{"in_ch", l.in_ch}, {"out_ch", l.out_ch}, {"ksize", l.ksize}});
  }
  write_text_file(path + ".json", side.dump(2) + "\n");
  write_raw_f32(path, params.flatten());
}

TaskModelParams load_model(const std::string& path) {
  const ordered_json side = read_json_file(path + ".json");
  TaskModelParams params;
  try {
    for (const auto& jl : side.at("layers")) {
      ConvLayer l;
      l.in_ch = jl.at("in_ch").get<int>();
      l.out_ch = jl.at("out_ch").get<int>();
      l.ksize = jl.at("ksize").get<int>();
      l.w.assign(static_cast<size_t>(l.out_ch) * l.in_ch * l.ksize * l.ksize, 0.0);
      l.b.assign(l.out_ch, 0.0);
      params.layers.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed model sidecar for " + path + ": " + e.what());
  }
  std::vector<double> flat = read_raw_f32(path, params.param_count());
  params.unflatten(flat);
  params.validate();
  return params;
}

std::string report_to_json(const FeasibilityReport& report) {
  ordered_json j;
  j["feasible"] = report.feasible;
  j["max_velocity_violation"] = report.max_velocity_violation;
  j["max_acceleration_violation"] = report.max_acceleration_violation;
  j["violating_sample_count"] = report.violating_sample_count;
  j["tolerance"] = report.tolerance;
  return j.dump(2);
}

void save_report_json(const std::string& path, const FeasibilityReport& report, double psnr_db,
                      double ssim_value) {
  ordered_json j;
  j["feasibility"] = ordered_json::parse(report_to_json(report));
  j["metrics"]["psnr_db"] = std::isfinite(psnr_db) ? ordered_json(psnr_db) : ordered_json("inf");
  j["metrics"]["ssim"] = ssim_value;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ktraj

#include "ktraj/nufft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace ktraj {

double NufftConfig::beta() const {
  if (kernel_beta > 0) return kernel_beta;
  const double w = kernel_width;
  const double t = w / oversampling * (oversampling - 0.5);
  return M_PI * std::sqrt(t * t - 0.8);
}

void NufftConfig::validate() const {
  if (oversampling <= 1.0) throw std::invalid_argument("NufftConfig: oversampling must be > 1");
  if (kernel_width < 2 || kernel_width % 2 != 0) {
    throw std::invalid_argument("NufftConfig: kernel width must be even and >= 2");
  }
  if (beta() <= 0) throw std::invalid_argument("NufftConfig: beta must be positive");
}

double kb_kernel(double u, const NufftConfig& cfg) {
  const double half = cfg.kernel_width / 2.0;
  if (std::abs(u) > half) return 0.0;
  const double b = cfg.beta();
  const double t = 2.0 * u / cfg.kernel_width;
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  return std::cyl_bessel_i(0.0, b * s) / std::cyl_bessel_i(0.0, b);
}

double kb_kernel_deriv(double u, const NufftConfig& cfg) {
  const double half = cfg.kernel_width / 2.0;
  if (std::abs(u) > half) return 0.0;
  const double b = cfg.beta();
  const double w = cfg.kernel_width;
  const double t = 2.0 * u / w;
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  const double i0b = std::cyl_bessel_i(0.0, b);
  // d/du I0(b*s) = I1(b*s) * b * ds/du with ds/du = -4u/(w^2 s);
  // near the support edge s -> 0 use I1(x) ~ x/2.
  if (s < 1e-8) return -2.0 * b * b * u / (w * w) / i0b;
  return std::cyl_bessel_i(1.0, b * s) * b * (-4.0 * u / (w * w * s)) / i0b;
}

namespace {

// Fourier transform of the Kaiser-Bessel kernel (x in cycles per grid cell);
// used for apodization correction.
double kb_transform(double x, double width, double beta) {
  const double a = M_PI * width * x;
  const double arg = beta * beta - a * a;
  double core;
  if (arg > 1e-12) {
    const double r = std::sqrt(arg);
    core = std::sinh(r) / r;
  } else if (arg < -1e-12) {
    const double r = std::sqrt(-arg);
    core = std::sin(r) / r;
  } else {
    core = 1.0;
  }
  return width * core / std::cyl_bessel_i(0.0, beta);
}

constexpr int kTabPerCell = 4096;

}  // namespace

struct NufftPlan::Impl {
  int n = 0;
  int grid = 0;
  NufftConfig cfg;
  int width = 4;
  double scale = 0.0;  // grid/n, maps grid-unit coordinates onto the oversampled grid

  struct CellWindow {
    int idx[8];    // wrapped grid indices
    double w[8];   // kernel weights
    double dw[8];  // kernel weight derivatives (in cell units)
  };

  std::vector<double> deapod;    // 1D separable factor, index u + n/2
  std::vector<double> tab;       // kernel values on [0, width/2]
  std::vector<double> dtab;      // kernel derivative on [0, width/2]
  fftw_plan plan_fwd = nullptr;  // unnormalized e^{-2 pi i}
  fftw_plan plan_bwd = nullptr;  // unnormalized e^{+2 pi i}

  ~Impl() {
    static std::mutex fftw_mutex;
    std::lock_guard<std::mutex> lock(fftw_mutex);
    if (plan_fwd) fftw_destroy_plan(plan_fwd);
    if (plan_bwd) fftw_destroy_plan(plan_bwd);
  }

  double kernel(double u) const {
    const double a = std::abs(u) * kTabPerCell;
    const size_t i = static_cast<size_t>(a);
    if (i + 1 >= tab.size()) return 0.0;
    const double f = a - static_cast<double>(i);
    return tab[i] + f * (tab[i + 1] - tab[i]);
  }

  double kernel_deriv(double u) const {
    const double a = std::abs(u) * kTabPerCell;
    const size_t i = static_cast<size_t>(a);
    if (i + 1 >= dtab.size()) return 0.0;
    const double f = a - static_cast<double>(i);
    const double d = dtab[i] + f * (dtab[i + 1] - dtab[i]);
    return u >= 0 ? d : -d;
  }

  // Apodized, zero-padded, FFT'd image on the oversampled grid (wrapped
  // frequency layout).
  std::vector<cplx> spectrum(const ComplexImage& image) const {
    std::vector<cplx> padded(static_cast<size_t>(grid) * grid, cplx{0.0, 0.0});
    const int h = n / 2;
    for (int v = -h; v < h; ++v) {
      const int gy = v >= 0 ? v : grid + v;
      for (int u = -h; u < h; ++u) {
        const int gx = u >= 0 ? u : grid + u;
        padded[static_cast<size_t>(gy) * grid + gx] =
            image.at(v + h, u + h) / (deapod[v + h] * deapod[u + h]);
      }
    }
    std::vector<cplx> out(padded.size());
    fftw_execute_dft(plan_fwd, reinterpret_cast<fftw_complex*>(padded.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  void check_coords(const Trajectory& traj) const {
    if (traj.grid_size() != n) {
      throw std::invalid_argument("nufft: trajectory grid size does not match plan");
    }
    const double half = n / 2.0;
    for (const Vec2& p : traj.points()) {
      if (std::abs(p.x) > half || std::abs(p.y) > half) {
        throw std::invalid_argument("nufft: coordinate outside the grid");
      }
    }
  }

  // Kernel window along one axis at scaled coordinate kappa. The integer cell
  // assignment is fixed by the unperturbed coordinate.
  void make_window(double kappa, CellWindow& out, bool with_deriv) const {
    const int j0 = static_cast<int>(std::floor(kappa)) - width / 2 + 1;
    for (int t = 0; t < width; ++t) {
      const int j = j0 + t;
      int g = j % grid;
      if (g < 0) g += grid;
      out.idx[t] = g;
      const double d = kappa - j;
      out.w[t] = kernel(d);
      if (with_deriv) out.dw[t] = kernel_deriv(d);
    }
  }
};

NufftPlan::NufftPlan(int n, NufftConfig cfg) : impl_(new Impl) {
  cfg.validate();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("nufft: image size must be even and >= 2");
  impl_->n = n;
  impl_->cfg = cfg;
  impl_->width = cfg.kernel_width;
  int g = static_cast<int>(std::ceil(cfg.oversampling * n));
  if (g % 2 != 0) ++g;
  impl_->grid = g;
  impl_->scale = static_cast<double>(g) / n;

  const double beta = cfg.beta();
  impl_->deapod.resize(n);
  for (int u = -n / 2; u < n / 2; ++u) {
    impl_->deapod[u + n / 2] = kb_transform(static_cast<double>(u) / g, cfg.kernel_width, beta);
  }

  const int half_cells = cfg.kernel_width / 2;
  const size_t tab_size = static_cast<size_t>(half_cells) * kTabPerCell + 2;
  impl_->tab.resize(tab_size);
  impl_->dtab.resize(tab_size);
  for (size_t i = 0; i < tab_size; ++i) {
    const double u = static_cast<double>(i) / kTabPerCell;
    impl_->tab[i] = kb_kernel(u, cfg);
    impl_->dtab[i] = kb_kernel_deriv(u, cfg);
  }

  // FFTW planning is not thread-safe; executing a plan on fresh arrays is.
  static std::mutex fftw_mutex;
  std::lock_guard<std::mutex> lock(fftw_mutex);
  std::vector<cplx> tmp_in(static_cast<size_t>(g) * g), tmp_out(tmp_in.size());
  impl_->plan_fwd = fftw_plan_dft_2d(g, g, reinterpret_cast<fftw_complex*>(tmp_in.data()),
                                     reinterpret_cast<fftw_complex*>(tmp_out.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl_->plan_bwd = fftw_plan_dft_2d(g, g, reinterpret_cast<fftw_complex*>(tmp_in.data()),
                                     reinterpret_cast<fftw_complex*>(tmp_out.data()),
                                     FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

NufftPlan::~NufftPlan() = default;

int NufftPlan::image_size() const { return impl_->n; }
int NufftPlan::grid_size() const { return impl_->grid; }

KSpaceSamples NufftPlan::forward(const ComplexImage& image, const Trajectory& traj) const {
  const Impl& im = *impl_;
  if (image.n != im.n) throw std::invalid_argument("nufft forward: image size mismatch");
  im.check_coords(traj);
  const std::vector<cplx> spec = im.spectrum(image);
  KSpaceSamples out(traj.shots(), traj.samples_per_shot());
  const auto& pts = traj.points();
  const int total = static_cast<int>(pts.size());
#pragma omp parallel for schedule(static)
  for (int s = 0; s < total; ++s) {
    Impl::CellWindow wx, wy;
    im.make_window(pts[s].x * im.scale, wx, false);
    im.make_window(pts[s].y * im.scale, wy, false);
    cplx acc{0.0, 0.0};
    for (int ty = 0; ty < im.width; ++ty) {
      const cplx* row = spec.data() + static_cast<size_t>(wy.idx[ty]) * im.grid;
      cplx rowacc{0.0, 0.0};
      for (int tx = 0; tx < im.width; ++tx) rowacc += wx.w[tx] * row[wx.idx[tx]];
      acc += wy.w[ty] * rowacc;
    }
    out.v[s] = acc;
  }
  return out;
}

ComplexImage NufftPlan::adjoint(const KSpaceSamples& samples, const Trajectory& traj) const {
  const Impl& im = *impl_;
  im.check_coords(traj);
  const auto& pts = traj.points();
  if (samples.v.size() != pts.size()) {
    throw std::invalid_argument("nufft adjoint: sample count does not match trajectory");
  }

  const size_t cells = static_cast<size_t>(im.grid) * im.grid;
  const int nthreads = omp_get_max_threads();
  std::vector<std::vector<cplx>> partial(nthreads);

  // Scatter into per-thread grids, then combine in fixed thread order so the
  // result does not depend on scheduling.
#pragma omp parallel
  {
    const int tid = omp_get_thread_num();
    partial[tid].assign(cells, cplx{0.0, 0.0});
    cplx* grid = partial[tid].data();
#pragma omp for schedule(static)
    for (int s = 0; s < static_cast<int>(pts.size()); ++s) {
      Impl::CellWindow wx, wy;
      im.make_window(pts[s].x * im.scale, wx, false);
      im.make_window(pts[s].y * im.scale, wy, false);
      const cplx val = samples.v[s];
      for (int ty = 0; ty < im.width; ++ty) {
        cplx* row = grid + static_cast<size_t>(wy.idx[ty]) * im.grid;
        const cplx vy = wy.w[ty] * val;
        for (int tx = 0; tx < im.width; ++tx) row[wx.idx[tx]] += wx.w[tx] * vy;
      }
    }
  }
  std::vector<cplx>& acc = partial[0];
  for (int t = 1; t < nthreads; ++t) {
    if (partial[t].empty()) continue;
    const cplx* src = partial[t].data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(cells); ++i) acc[i] += src[i];
  }

  std::vector<cplx> img_grid(cells);
  fftw_execute_dft(impl_->plan_bwd, reinterpret_cast<fftw_complex*>(acc.data()),
                   reinterpret_cast<fftw_complex*>(img_grid.data()));

  ComplexImage out(im.n);
  const int h = im.n / 2;
  for (int v = -h; v < h; ++v) {
    const int gy = v >= 0 ? v : im.grid + v;
    for (int u = -h; u < h; ++u) {
      const int gx = u >= 0 ? u : im.grid + u;
      out.at(v + h, u + h) =
          img_grid[static_cast<size_t>(gy) * im.grid + gx] / (im.deapod[v + h] * im.deapod[u + h]);
    }
  }
  return out;
}

std::vector<Vec2> NufftPlan::forward_grad_k(const ComplexImage& image, const Trajectory& traj,
                                            const KSpaceSamples& upstream) const {
  const Impl& im = *impl_;
  if (image.n != im.n) throw std::invalid_argument("nufft forward_grad_k: image size mismatch");
  im.check_coords(traj);
  const auto& pts = traj.points();
  if (upstream.v.size() != pts.size()) {
    throw std::invalid_argument("nufft forward_grad_k: upstream size mismatch");
  }
  const std::vector<cplx> spec = im.spectrum(image);
  std::vector<Vec2> grad(pts.size());
#pragma omp parallel for schedule(static)
  for (int s = 0; s < static_cast<int>(pts.size()); ++s) {
    Impl::CellWindow wx, wy;
    im.make_window(pts[s].x * im.scale, wx, true);
    im.make_window(pts[s].y * im.scale, wy, true);
    cplx dx{0.0, 0.0}, dy{0.0, 0.0};
    for (int ty = 0; ty < im.width; ++ty) {
      const cplx* row = spec.data() + static_cast<size_t>(wy.idx[ty]) * im.grid;
      cplx acc_w{0.0, 0.0}, acc_dw{0.0, 0.0};
      for (int tx = 0; tx < im.width; ++tx) {
        const cplx c = row[wx.idx[tx]];
        acc_w += wx.w[tx] * c;
        acc_dw += wx.dw[tx] * c;
      }
      dx += wy.w[ty] * acc_dw;
      dy += wy.dw[ty] * acc_w;
    }
    const cplx u = std::conj(upstream.v[s]);
    grad[s].x = im.scale * (u * dx).real();
    grad[s].y = im.scale * (u * dy).real();
  }
  return grad;
}

std::vector<Vec2> NufftPlan::adjoint_grad_k(const KSpaceSamples& samples, const Trajectory& traj,
                                            const ComplexImage& upstream) const {
  const Impl& im = *impl_;
  if (upstream.n != im.n) {
    throw std::invalid_argument("nufft adjoint_grad_k: upstream size mismatch");
  }
  im.check_coords(traj);
  const auto& pts = traj.points();
  if (samples.v.size() != pts.size()) {
    throw std::invalid_argument("nufft adjoint_grad_k: sample count mismatch");
  }
  // Re<U, adjoint(S, k)> = Re sum_s S_s * conj(forward(U, k)_s), so the
  // k-derivative reuses the forward interpolation machinery on U.
  const std::vector<cplx> spec = im.spectrum(upstream);
  std::vector<Vec2> grad(pts.size());
#pragma omp parallel for schedule(static)
  for (int s = 0; s < static_cast<int>(pts.size()); ++s) {
    Impl::CellWindow wx, wy;
    im.make_window(pts[s].x * im.scale, wx, true);
    im.make_window(pts[s].y * im.scale, wy, true);
    cplx dx{0.0, 0.0}, dy{0.0, 0.0};
    for (int ty = 0; ty < im.width; ++ty) {
      const cplx* row = spec.data() + static_cast<size_t>(wy.idx[ty]) * im.grid;
      cplx acc_w{0.0, 0.0}, acc_dw{0.0, 0.0};
      for (int tx = 0; tx < im.width; ++tx) {
        const cplx c = row[wx.idx[tx]];
        acc_w += wx.w[tx] * c;
        acc_dw += wx.dw[tx] * c;
      }
      dx += wy.w[ty] * acc_dw;
      dy += wy.dw[ty] * acc_w;
    }
    const cplx s_val = samples.v[s];
    grad[s].x = im.scale * (s_val * std::conj(dx)).real();
    grad[s].y = im.scale * (s_val * std::conj(dy)).real();
  }
  return grad;
}

const NufftPlan& nufft_plan(int n, const NufftConfig& cfg) {
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, double, int, double>, std::unique_ptr<NufftPlan>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_tuple(n, cfg.oversampling, cfg.kernel_width, cfg.beta());
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<NufftPlan>(n, cfg)).first;
  }
  return *it->second;
}

KSpaceSamples nufft_forward(const ComplexImage& image, const Trajectory& traj,
                            const NufftConfig& cfg) {
  return nufft_plan(image.n, cfg).forward(image, traj);
}

ComplexImage nufft_adjoint(const KSpaceSamples& samples, const Trajectory& traj,
                           const NufftConfig& cfg, int n) {
  return nufft_plan(n, cfg).adjoint(samples, traj);
}

std::vector<Vec2> nufft_forward_grad_k(const ComplexImage& image, const Trajectory& traj,
                                       const NufftConfig& cfg, const KSpaceSamples& upstream) {
  return nufft_plan(image.n, cfg).forward_grad_k(image, traj, upstream);
}

std::vector<Vec2> nufft_adjoint_grad_k(const KSpaceSamples& samples, const Trajectory& traj,
                                       const NufftConfig& cfg, int n,
                                       const ComplexImage& upstream) {
  return nufft_plan(n, cfg).adjoint_grad_k(samples, traj, upstream);
}

}  // namespace ktraj

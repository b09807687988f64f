#pragma once

#include <memory>
#include <vector>

#include "ktraj/trajectory.hpp"
#include "ktraj/types.hpp"

namespace ktraj {

struct NufftConfig {
  double oversampling = 1.25;
  int kernel_width = 4;      // cells on the oversampled grid, even
  double kernel_beta = 0.0;  // 0 selects the standard shape for (width, oversampling)

  double beta() const;
  void validate() const;
};

// Kaiser-Bessel interpolation kernel, compactly supported on |u| <= width/2,
// normalized to 1 at u = 0.
double kb_kernel(double u, const NufftConfig& cfg);
double kb_kernel_deriv(double u, const NufftConfig& cfg);

// Discretized non-uniform FFT pair for a fixed grid size and kernel config.
// forward: apodize -> zero-padded FFT onto the oversampled grid -> kernel
// interpolation at each scaled coordinate. adjoint is the exact conjugate
// transpose of the same linear map. Plans are reusable and safe for
// concurrent use from multiple threads.
class NufftPlan {
 public:
  NufftPlan(int n, NufftConfig cfg);
  ~NufftPlan();
  NufftPlan(const NufftPlan&) = delete;
  NufftPlan& operator=(const NufftPlan&) = delete;

  int image_size() const;
  int grid_size() const;  // oversampled grid, next even integer >= oversampling*n

  KSpaceSamples forward(const ComplexImage& image, const Trajectory& traj) const;
  ComplexImage adjoint(const KSpaceSamples& samples, const Trajectory& traj) const;

  // Gradient of Re<upstream, forward(image, k)> with respect to every
  // coordinate. Kernel cell assignments are held fixed; only the kernel
  // weights are differentiated.
  std::vector<Vec2> forward_grad_k(const ComplexImage& image, const Trajectory& traj,
                                   const KSpaceSamples& upstream) const;

  // Gradient of Re<upstream, adjoint(samples, k)> with respect to every
  // coordinate.
  std::vector<Vec2> adjoint_grad_k(const KSpaceSamples& samples, const Trajectory& traj,
                                   const ComplexImage& upstream) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrappers backed by a process-wide plan cache.
KSpaceSamples nufft_forward(const ComplexImage& image, const Trajectory& traj,
                            const NufftConfig& cfg);
ComplexImage nufft_adjoint(const KSpaceSamples& samples, const Trajectory& traj,
                           const NufftConfig& cfg, int n);
std::vector<Vec2> nufft_forward_grad_k(const ComplexImage& image, const Trajectory& traj,
                                       const NufftConfig& cfg, const KSpaceSamples& upstream);
std::vector<Vec2> nufft_adjoint_grad_k(const KSpaceSamples& samples, const Trajectory& traj,
                                       const NufftConfig& cfg, int n,
                                       const ComplexImage& upstream);

// Returns the cached plan for (n, cfg), creating it on first use.
const NufftPlan& nufft_plan(int n, const NufftConfig& cfg);

}  // namespace ktraj

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ktraj/types.hpp"

namespace ktraj {

struct ConvLayer {
  int in_ch = 0;
  int out_ch = 0;
  int ksize = 0;          // odd
  std::vector<double> w;  // out_ch x in_ch x ksize x ksize
  std::vector<double> b;  // out_ch
};

// Small residual convolutional reconstruction model: zero-padded same-size
// convolutions with a rectifier between layers, linear final layer, and a
// residual connection from input to output.
struct TaskModelParams {
  std::vector<ConvLayer> layers;

  // 3 layers, widths 1 -> 8 -> 8 -> 1, 5x5 kernels, seeded He-style init.
  static TaskModelParams make_default(uint64_t seed);

  size_t param_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);
  void validate() const;
};

// Stored activations from a forward pass, consumed by model_backward.
struct ModelCache {
  RealImage input;
  // inputs[l] = channel images fed into layer l; pre[l] = pre-activation
  // output channels of layer l.
  std::vector<std::vector<RealImage>> inputs;
  std::vector<std::vector<RealImage>> pre;
};

struct ModelGrads {
  std::vector<double> params;  // flattened, same order as TaskModelParams::flatten
  RealImage input;
};

// Pixelwise sqrt of the summed squared channel moduli.
RealImage rss(const MultiChannelImage& channels);

// Gradient of Re<upstream, .> through the root-sum-of-squares, given the
// channels and the rss output of the forward pass.
MultiChannelImage rss_backward(const MultiChannelImage& channels, const RealImage& rss_out,
                               const RealImage& upstream);

std::pair<RealImage, ModelCache> model_forward(const TaskModelParams& params,
                                               const RealImage& input);
ModelGrads model_backward(const TaskModelParams& params, const ModelCache& cache,
                          const RealImage& upstream);

struct LossResult {
  double value = 0.0;
  RealImage grad;
};

// Mean absolute error with its subgradient (0 at ties).
LossResult l1_loss(const RealImage& pred, const RealImage& target);

// 20*log10(range(target)/RMSE); +inf for identical images.
double psnr(const RealImage& pred, const RealImage& target);

// Single-scale SSIM, Gaussian window 11, sigma 1.5, k1 = 0.01, k2 = 0.03,
// dynamic range taken from the target, averaged over windows fully inside.
double ssim(const RealImage& pred, const RealImage& target);

// Adds white Gaussian noise to real and imaginary parts so the empirical
// signal-to-noise ratio equals snr_db. +inf leaves the samples unchanged.
KSpaceSamples add_noise(const KSpaceSamples& samples, double snr_db, uint64_t seed);

}  // namespace ktraj

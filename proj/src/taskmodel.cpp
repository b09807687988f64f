#include "ktraj/taskmodel.hpp"

#include <cmath>

#include "ktraj/rng.hpp"

namespace ktraj {

TaskModelParams TaskModelParams::make_default(uint64_t seed) {
  const int widths[] = {1, 8, 8, 1};
  const int k = 5;
  Rng rng(mix_seed(seed, 0x7a53ull));
  TaskModelParams p;
  for (int l = 0; l < 3; ++l) {
    ConvLayer layer;
    layer.in_ch = widths[l];
    layer.out_ch = widths[l + 1];
    layer.ksize = k;
    layer.w.resize(static_cast<size_t>(layer.out_ch) * layer.in_ch * k * k);
    layer.b.assign(layer.out_ch, 0.0);
    const double scale = std::sqrt(2.0 / (layer.in_ch * k * k));
    for (double& v : layer.w) v = scale * rng.gauss();
    p.layers.push_back(std::move(layer));
  }
  return p;
}

size_t TaskModelParams::param_count() const {
  size_t c = 0;
  for (const auto& l : layers) c += l.w.size() + l.b.size();
  return c;
}

std::vector<double> TaskModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.w.begin(), l.w.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  }
  return flat;
}

void TaskModelParams::unflatten(const std::vector<double>& flat) {
  size_t pos = 0;
  for (auto& l : layers) {
    std::copy(flat.begin() + pos, flat.begin() + pos + l.w.size(), l.w.begin());
    pos += l.w.size();
    std::copy(flat.begin() + pos, flat.begin() + pos + l.b.size(), l.b.begin());
    pos += l.b.size();
  }
  if (pos != flat.size()) throw std::invalid_argument("unflatten: size mismatch");
}

void TaskModelParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("TaskModelParams: no layers");
  if (layers.front().in_ch != 1 || layers.back().out_ch != 1) {
    throw std::invalid_argument("TaskModelParams: model must map 1 channel to 1 channel");
  }
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.ksize < 1 || l.ksize % 2 == 0) {
      throw std::invalid_argument("TaskModelParams: kernel size must be odd");
    }
    if (l.w.size() != static_cast<size_t>(l.out_ch) * l.in_ch * l.ksize * l.ksize ||
        l.b.size() != static_cast<size_t>(l.out_ch)) {
      throw std::invalid_argument("TaskModelParams: tensor shape mismatch");
    }
    if (i + 1 < layers.size() && l.out_ch != layers[i + 1].in_ch) {
      throw std::invalid_argument("TaskModelParams: channel chain mismatch");
    }
    for (double v : l.w) {
      if (!std::isfinite(v)) throw std::invalid_argument("TaskModelParams: non-finite weight");
    }
  }
}

RealImage rss(const MultiChannelImage& channels) {
  if (channels.empty()) throw std::invalid_argument("rss: no channels");
  const int n = channels[0].n;
  RealImage out(n);
  for (const auto& ch : channels) {
    if (ch.n != n) throw std::invalid_argument("rss: channel size mismatch");
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += std::norm(ch.v[i]);
  }
  for (double& v : out.v) v = std::sqrt(v);
  return out;
}

MultiChannelImage rss_backward(const MultiChannelImage& channels, const RealImage& rss_out,
                               const RealImage& upstream) {
  MultiChannelImage grads(channels.size());
  for (size_t c = 0; c < channels.size(); ++c) {
    grads[c] = ComplexImage(channels[c].n);
    for (size_t i = 0; i < channels[c].v.size(); ++i) {
      const double r = rss_out.v[i];
      grads[c].v[i] = r > 0 ? channels[c].v[i] * (upstream.v[i] / r) : cplx{0.0, 0.0};
    }
  }
  return grads;
}

namespace {

// out[oc] += conv(in channels, w[oc]), zero padded, same size.
void conv_forward_layer(const ConvLayer& layer, const std::vector<RealImage>& in,
                        std::vector<RealImage>& out) {
  const int n = in[0].n;
  const int k = layer.ksize;
  const int p = k / 2;
  out.assign(layer.out_ch, RealImage(n));
#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    RealImage& o = out[oc];
    for (double& v : o.v) v = layer.b[oc];
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const RealImage& src = in[ic];
      const double* wbase =
          layer.w.data() + (static_cast<size_t>(oc) * layer.in_ch + ic) * k * k;
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx) {
          const double wv = wbase[dy * k + dx];
          if (wv == 0.0) continue;
          const int oy0 = std::max(0, p - dy);
          const int oy1 = std::min(n, n + p - dy);
          const int ox0 = std::max(0, p - dx);
          const int ox1 = std::min(n, n + p - dx);
          for (int y = oy0; y < oy1; ++y) {
            const double* srow = &src.at(y + dy - p, 0);
            double* orow = &o.at(y, 0);
            for (int x = ox0; x < ox1; ++x) orow[x] += wv * srow[x + dx - p];
          }
        }
      }
    }
  }
}

// Transpose of conv_forward_layer with respect to the input channels.
void conv_backward_input(const ConvLayer& layer, const std::vector<RealImage>& gout,
                         std::vector<RealImage>& gin) {
  const int n = gout[0].n;
  const int k = layer.ksize;
  const int p = k / 2;
  gin.assign(layer.in_ch, RealImage(n));
#pragma omp parallel for schedule(static)
  for (int ic = 0; ic < layer.in_ch; ++ic) {
    RealImage& gi = gin[ic];
    for (int oc = 0; oc < layer.out_ch; ++oc) {
      const RealImage& go = gout[oc];
      const double* wbase =
          layer.w.data() + (static_cast<size_t>(oc) * layer.in_ch + ic) * k * k;
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx) {
          const double wv = wbase[dy * k + dx];
          if (wv == 0.0) continue;
          const int oy0 = std::max(0, p - dy);
          const int oy1 = std::min(n, n + p - dy);
          const int ox0 = std::max(0, p - dx);
          const int ox1 = std::min(n, n + p - dx);
          for (int y = oy0; y < oy1; ++y) {
            double* irow = &gi.at(y + dy - p, 0);
            const double* grow = &go.at(y, 0);
            for (int x = ox0; x < ox1; ++x) irow[x + dx - p] += wv * grow[x];
          }
        }
      }
    }
  }
}

void conv_backward_params(const ConvLayer& layer, const std::vector<RealImage>& in,
                          const std::vector<RealImage>& gout, double* gw, double* gb) {
  const int n = gout[0].n;
  const int k = layer.ksize;
  const int p = k / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const RealImage& src = in[ic];
      const RealImage& go = gout[oc];
      double* wslot = gw + (static_cast<size_t>(oc) * layer.in_ch + ic) * k * k;
      for (int dy = 0; dy < k; ++dy) {
        for (int dx = 0; dx < k; ++dx) {
          const int oy0 = std::max(0, p - dy);
          const int oy1 = std::min(n, n + p - dy);
          const int ox0 = std::max(0, p - dx);
          const int ox1 = std::min(n, n + p - dx);
          double acc = 0.0;
          for (int y = oy0; y < oy1; ++y) {
            const double* srow = &src.at(y + dy - p, 0);
            const double* grow = &go.at(y, 0);
            for (int x = ox0; x < ox1; ++x) acc += grow[x] * srow[x + dx - p];
          }
          wslot[dy * k + dx] = acc;
        }
      }
    }
  }
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    double acc = 0.0;
    for (const double v : gout[oc].v) acc += v;
    gb[oc] = acc;
  }
}

}  // namespace

std::pair<RealImage, ModelCache> model_forward(const TaskModelParams& params,
                                               const RealImage& input) {
  params.validate();
  ModelCache cache;
  cache.input = input;
  cache.inputs.resize(params.layers.size());
  cache.pre.resize(params.layers.size());

  std::vector<RealImage> x{input};
  for (size_t l = 0; l < params.layers.size(); ++l) {
    cache.inputs[l] = x;
    std::vector<RealImage> z;
    conv_forward_layer(params.layers[l], x, z);
    cache.pre[l] = z;
    if (l + 1 < params.layers.size()) {
      for (auto& ch : z) {
        for (double& v : ch.v) v = v > 0 ? v : 0.0;
      }
    }
    x = std::move(z);
  }
  RealImage out = x[0];
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += input.v[i];  // residual
  return {std::move(out), std::move(cache)};
}

ModelGrads model_backward(const TaskModelParams& params, const ModelCache& cache,
                          const RealImage& upstream) {
  ModelGrads grads;
  grads.params.assign(params.param_count(), 0.0);

  // Slot offsets into the flattened parameter vector.
  std::vector<size_t> offsets(params.layers.size());
  size_t pos = 0;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    offsets[l] = pos;
    pos += params.layers[l].w.size() + params.layers[l].b.size();
  }

  std::vector<RealImage> g{upstream};
  for (size_t l = params.layers.size(); l-- > 0;) {
    const ConvLayer& layer = params.layers[l];
    if (l + 1 < params.layers.size()) {
      // Rectifier mask from the stored pre-activations.
      for (int oc = 0; oc < layer.out_ch; ++oc) {
        for (size_t i = 0; i < g[oc].v.size(); ++i) {
          if (cache.pre[l][oc].v[i] <= 0) g[oc].v[i] = 0.0;
        }
      }
    }
    double* gw = grads.params.data() + offsets[l];
    double* gb = gw + layer.w.size();
    conv_backward_params(layer, cache.inputs[l], g, gw, gb);
    std::vector<RealImage> gin;
    conv_backward_input(layer, g, gin);
    g = std::move(gin);
  }
  grads.input = g[0];
  for (size_t i = 0; i < grads.input.v.size(); ++i) grads.input.v[i] += upstream.v[i];  // residual
  return grads;
}

LossResult l1_loss(const RealImage& pred, const RealImage& target) {
  if (pred.n != target.n) throw std::invalid_argument("l1_loss: size mismatch");
  LossResult res;
  res.grad = RealImage(pred.n);
  const double inv = 1.0 / static_cast<double>(pred.v.size());
  for (size_t i = 0; i < pred.v.size(); ++i) {
    const double d = pred.v[i] - target.v[i];
    res.value += std::abs(d);
    res.grad.v[i] = d > 0 ? inv : (d < 0 ? -inv : 0.0);
  }
  res.value *= inv;
  return res;
}

KSpaceSamples add_noise(const KSpaceSamples& samples, double snr_db, uint64_t seed) {
  if (std::isinf(snr_db)) return samples;
  double power = 0.0;
  for (const cplx& s : samples.v) power += std::norm(s);
  power /= static_cast<double>(samples.v.size());
  if (power == 0.0) return samples;
  // Split the requested noise power evenly between real and imaginary parts.
  const double noise_power = power * std::pow(10.0, -snr_db / 10.0);
  const double sigma = std::sqrt(noise_power / 2.0);
  Rng rng(mix_seed(seed, 0xad01ull));
  KSpaceSamples out = samples;
  for (cplx& s : out.v) s += cplx{sigma * rng.gauss(), sigma * rng.gauss()};
  return out;
}

}  // namespace ktraj

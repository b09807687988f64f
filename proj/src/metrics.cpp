#include <algorithm>
#include <cmath>
#include <limits>

#include "ktraj/taskmodel.hpp"

namespace ktraj {
namespace {

double value_range(const RealImage& img) {
  const auto [lo, hi] = std::minmax_element(img.v.begin(), img.v.end());
  return *hi - *lo;
}

}  // namespace

double psnr(const RealImage& pred, const RealImage& target) {
  if (pred.n != target.n) throw std::invalid_argument("psnr: size mismatch");
  double mse = 0.0;
  for (size_t i = 0; i < pred.v.size(); ++i) {
    const double d = pred.v[i] - target.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pred.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(value_range(target) / std::sqrt(mse));
}

double ssim(const RealImage& pred, const RealImage& target) {
  if (pred.n != target.n) throw std::invalid_argument("ssim: size mismatch");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double k1 = 0.01, k2 = 0.03;
  const int n = pred.n;
  if (n < kWin) throw std::invalid_argument("ssim: image smaller than the window");

  double win[kWin][kWin];
  double wsum = 0.0;
  for (int y = 0; y < kWin; ++y) {
    for (int x = 0; x < kWin; ++x) {
      const double dy = y - kWin / 2, dx = x - kWin / 2;
      win[y][x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      wsum += win[y][x];
    }
  }
  for (auto& row : win) {
    for (double& v : row) v /= wsum;
  }

  const double range = value_range(target);
  const double c1 = (k1 * range) * (k1 * range);
  const double c2 = (k2 * range) * (k2 * range);

  const int valid = n - kWin + 1;
  // Per-row partial sums combined in fixed order keep the result independent
  // of thread scheduling.
  std::vector<double> row_total(valid, 0.0);
#pragma omp parallel for schedule(static)
  for (int cy = 0; cy < valid; ++cy) {
    double total = 0.0;
    for (int cx = 0; cx < valid; ++cx) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int y = 0; y < kWin; ++y) {
        for (int x = 0; x < kWin; ++x) {
          const double a = pred.at(cy + y, cx + x);
          const double b = target.at(cy + y, cx + x);
          const double w = win[y][x];
          mx += w * a;
          my += w * b;
          sxx += w * a * a;
          syy += w * b * b;
          sxy += w * a * b;
        }
      }
      sxx -= mx * mx;
      syy -= my * my;
      sxy -= mx * my;
      total += ((2 * mx * my + c1) * (2 * sxy + c2)) /
               ((mx * mx + my * my + c1) * (sxx + syy + c2));
    }
    row_total[cy] = total;
  }
  double total = 0.0;
  for (const double v : row_total) total += v;
  return total / (static_cast<double>(valid) * valid);
}

}  // namespace ktraj

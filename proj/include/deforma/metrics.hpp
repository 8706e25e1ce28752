#pragma once

#include <vector>

#include "deforma/tensor.hpp"

namespace deforma {

struct SsimParams {
  int window = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_window(int size, double sigma);

/// Mean SSIM over every position where the Gaussian window fits entirely
/// inside the image, averaged over channels.
double ssim(const Tensor& x, const Tensor& y, const SsimParams& p = {});

/// SSIM of x * mask and y * mask; `mask` is single-channel and broadcast.
double masked_ssim(const Tensor& x, const Tensor& y, const Tensor& mask, const SsimParams& p = {});

}  // namespace deforma

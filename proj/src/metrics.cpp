#include "deforma/metrics.hpp"

#include <cmath>
#include <string>

#include "deforma/error.hpp"

namespace deforma {

namespace {

void check_params(const SsimParams& p, const Tensor& x) {
  if (p.window < 3 || p.window % 2 == 0) {
    throw DomainError("ssim window must be odd and >= 3, got " + std::to_string(p.window));
  }
  if (!(p.k1 > 0.0) || !(p.k2 > 0.0) || !(p.dynamic_range > 0.0) || !(p.gaussian_sigma > 0.0)) {
    throw DomainError("ssim constants must be positive");
  }
  const auto w = static_cast<std::size_t>(p.window);
  if (w > x.height() || w > x.width()) {
    throw DomainError("ssim window " + std::to_string(p.window) + " exceeds image " + to_string(x.shape()));
  }
}

// Separable "valid" filtering of one channel: rows first, then columns.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t height, std::size_t width,
                                 const std::vector<double>& taps) {
  const std::size_t k = taps.size();
  const std::size_t out_w = width - k + 1, out_h = height - k + 1;
  std::vector<double> horizontal(height * out_w);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += taps[t] * img[r * width + c + t];
      horizontal[r * out_w + c] = s;
    }
  }
  std::vector<double> out(out_h * out_w);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += taps[t] * horizontal[(r + t) * out_w + c];
      out[r * out_w + c] = s;
    }
  }
  return out;
}

}  // namespace

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(size));
  const double centre = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - centre;
    taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    total += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= total;
  return taps;
}

double ssim(const Tensor& x, const Tensor& y, const SsimParams& p) {
  require_same_shape(x, y, "ssim");
  check_params(p, x);
  const std::size_t height = x.height(), width = x.width(), channels = x.channels();
  const auto taps = gaussian_window(p.window, p.gaussian_sigma);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

  double channel_total = 0.0;
  std::vector<double> a(height * width), b(height * width), aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t ch = 0; ch < channels; ++ch) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = x.values()[i * channels + ch];
      b[i] = y.values()[i * channels + ch];
      aa[i] = a[i] * a[i];
      bb[i] = b[i] * b[i];
      ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(a, height, width, taps);
    const auto mu_b = filter_valid(b, height, width, taps);
    const auto e_aa = filter_valid(aa, height, width, taps);
    const auto e_bb = filter_valid(bb, height, width, taps);
    const auto e_ab = filter_valid(ab, height, width, taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double mu_ab = mu_a[i] * mu_b[i];
      const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
      const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_ab;
      sum += ((2.0 * mu_ab + c1) * (2.0 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2));
    }
    channel_total += sum / static_cast<double>(mu_a.size());
  }
  return channel_total / static_cast<double>(channels);
}

double masked_ssim(const Tensor& x, const Tensor& y, const Tensor& mask, const SsimParams& p) {
  require_same_shape(x, y, "masked_ssim");
  if (mask.channels() != 1 || mask.height() != x.height() || mask.width() != x.width()) {
    throw ShapeError("masked_ssim: mask " + to_string(mask.shape()) + " does not fit " + to_string(x.shape()));
  }
  Tensor mx = x, my = y;
  const std::size_t channels = x.channels();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const float m = mask.values()[i];
    for (std::size_t c = 0; c < channels; ++c) {
      mx.values()[i * channels + c] *= m;
      my.values()[i * channels + c] *= m;
    }
  }
  return ssim(mx, my, p);
}

}  // namespace deforma

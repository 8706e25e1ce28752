#include "deforma/nnloss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "deforma/error.hpp"
#include "deforma/parallel.hpp"

namespace deforma {

namespace {

constexpr float kSentinel = std::numeric_limits<float>::max();

void check_inputs(const Tensor& cx, const Tensor& cy, int n, const char* what) {
  require_same_shape(cx, cy, what);
  if (n < 1 || n % 2 == 0) {
    throw DomainError(std::string(what) + ": neighbourhood size must be odd and >= 1, got " + std::to_string(n));
  }
}

// Channel-summed |x - y| for one location, accumulated in channel order.
inline float channel_l1(const float* x, const float* y, std::size_t channels) {
  float s = 0.0f;
  for (std::size_t c = 0; c < channels; ++c) s += std::fabs(x[c] - y[c]);
  return s;
}

// Four float lanes; GCC/Clang vector extensions keep the accumulators in
// registers on any target.
typedef float Vec4 __attribute__((vector_size(16)));
typedef std::int32_t Int4 __attribute__((vector_size(16)));

inline Vec4 load4(const float* p) {
  Vec4 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline Vec4 abs_diff(Vec4 a, Vec4 b) {
  const Vec4 d = a - b;
  Int4 bits;
  std::memcpy(&bits, &d, sizeof bits);
  bits &= 0x7fffffff;
  Vec4 out;
  std::memcpy(&out, &bits, sizeof out);
  return out;
}

// Sums per-row partials in row order; partials are filled in parallel.
double sum_rows(std::size_t height, const std::function<double(std::size_t)>& row_sum) {
  std::vector<double> partial(height, 0.0);
  parallel_for(height, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) partial[r] = row_sum(r);
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

double l1_loss(const Tensor& x, const Tensor& y) {
  require_same_shape(x, y, "l1_loss");
  const std::size_t width = x.width(), channels = x.channels();
  return sum_rows(x.height(), [&](std::size_t r) {
    const float* xr = x.row(r).data();
    const float* yr = y.row(r).data();
    double row = 0.0;
    for (std::size_t c = 0; c < width; ++c) row += channel_l1(xr + c * channels, yr + c * channels, channels);
    return row;
  });
}

double nn_loss_fast(const Tensor& cx, const Tensor& cy, int n) {
  check_inputs(cx, cy, n, "nn_loss_fast");
  const std::size_t height = cx.height(), width = cx.width(), channels = cx.channels();
  const auto half = static_cast<long>(n / 2);
  const auto span = static_cast<std::size_t>(n);
  const std::size_t padded_width = width + 2 * static_cast<std::size_t>(half);

  // Rows are handled channel-major (channel, column), so the channel sum of
  // a difference map is a vertical accumulate across locations. A cy row is
  // stored inside a sentinel frame `half` cells wide; rows outside the grid
  // are all sentinel. The shifted tensor cy^(i,j) at row r is then frame row
  // r + i read from column offset half + j.
  std::vector<double> partial(height, 0.0);
  parallel_for(height, [&](std::size_t begin, std::size_t end) {
    constexpr std::size_t kBlock = 16;
    std::vector<float> xt(channels * width);
    std::vector<float> frames(span * channels * padded_width);
    std::vector<long> frame_row(span, std::numeric_limits<long>::min());
    std::vector<float> best(width);

    auto frame = [&](long rr) -> const float* {
      const std::size_t slot = static_cast<std::size_t>((rr % n + n) % n);
      float* f = frames.data() + slot * channels * padded_width;
      if (frame_row[slot] == rr) return f;
      frame_row[slot] = rr;
      std::fill(f, f + channels * padded_width, kSentinel);
      if (rr >= 0 && rr < static_cast<long>(height)) {
        const float* src = cy.row(static_cast<std::size_t>(rr)).data();
        for (std::size_t w = 0; w < width; ++w) {
          for (std::size_t c = 0; c < channels; ++c) {
            f[c * padded_width + static_cast<std::size_t>(half) + w] = src[w * channels + c];
          }
        }
      }
      return f;
    };

    for (std::size_t r = begin; r < end; ++r) {
      const float* xr = cx.row(r).data();
      for (std::size_t w = 0; w < width; ++w) {
        for (std::size_t c = 0; c < channels; ++c) xt[c * width + w] = xr[w * channels + c];
      }
      std::fill(best.begin(), best.end(), std::numeric_limits<float>::infinity());
      // Offsets in fixed order (row shift outer, column shift inner). Each
      // location sums its channels in channel order, exactly like channel_l1.
      for (long di = -half; di <= half; ++di) {
        const float* yt = frame(static_cast<long>(r) + di);
        for (std::size_t dj = 0; dj < span; ++dj) {
          std::size_t w0 = 0;
          for (; w0 + kBlock <= width; w0 += kBlock) {
            Vec4 acc0{}, acc1{}, acc2{}, acc3{};
            for (std::size_t c = 0; c < channels; ++c) {
              const float* xs = xt.data() + c * width + w0;
              const float* ys = yt + c * padded_width + dj + w0;
              acc0 += abs_diff(load4(xs), load4(ys));
              acc1 += abs_diff(load4(xs + 4), load4(ys + 4));
              acc2 += abs_diff(load4(xs + 8), load4(ys + 8));
              acc3 += abs_diff(load4(xs + 12), load4(ys + 12));
            }
            float* b = best.data() + w0;
            for (std::size_t k = 0; k < 4; ++k) {
              b[k] = std::min(b[k], acc0[k]);
              b[4 + k] = std::min(b[4 + k], acc1[k]);
              b[8 + k] = std::min(b[8 + k], acc2[k]);
              b[12 + k] = std::min(b[12 + k], acc3[k]);
            }
          }
          for (std::size_t w = w0; w < width; ++w) {
            float acc = 0.0f;
            for (std::size_t c = 0; c < channels; ++c) {
              acc += std::fabs(xt[c * width + w] - yt[c * padded_width + dj + w]);
            }
            best[w] = std::min(best[w], acc);
          }
        }
      }
      double row = 0.0;
      for (float m : best) row += m;
      partial[r] = row;
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double nn_loss_bruteforce(const Tensor& cx, const Tensor& cy, int n) {
  check_inputs(cx, cy, n, "nn_loss_bruteforce");
  const auto height = static_cast<long>(cx.height());
  const auto width = static_cast<long>(cx.width());
  const std::size_t channels = cx.channels();
  const long half = n / 2;
  double total = 0.0;
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      double best = std::numeric_limits<double>::infinity();
      const auto x = cx.pixel(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      for (long i = -half; i <= half; ++i) {
        for (long j = -half; j <= half; ++j) {
          const long rr = r + i, cc = c + j;
          if (rr < 0 || rr >= height || cc < 0 || cc >= width) continue;
          const auto y = cy.pixel(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
          double d = 0.0;
          for (std::size_t k = 0; k < channels; ++k) {
            d += std::fabs(static_cast<double>(x[k]) - static_cast<double>(y[k]));
          }
          best = std::min(best, d);
        }
      }
      total += std::isfinite(best) ? best : 0.0;
    }
  }
  return total;
}

double nn_loss(const Tensor& cx, const Tensor& cy, int n) { return nn_loss_fast(cx, cy, n); }

GanLosses gan_losses(std::span<const double> d_real, std::span<const double> d_fake, GeneratorLoss form) {
  if (d_real.empty() || d_fake.empty()) throw DomainError("gan_losses needs at least one real and one fake score");
  auto check = [](std::span<const double> scores, const char* name) {
    for (double s : scores) {
      if (!(s > 0.0 && s < 1.0)) {
        throw DomainError(std::string("gan_losses: ") + name + " score " + std::to_string(s) +
                          " is outside (0, 1)");
      }
    }
  };
  check(d_real, "real");
  check(d_fake, "fake");

  auto mean_of = [](std::span<const double> v, auto f) {
    double sum = 0.0;
    for (double s : v) sum += f(s);
    return sum / static_cast<double>(v.size());
  };
  const double log_real = mean_of(d_real, [](double s) { return std::log(s); });
  const double log_one_minus_fake = mean_of(d_fake, [](double s) { return std::log1p(-s); });

  GanLosses out;
  out.d_loss = -log_real - log_one_minus_fake;
  out.g_loss = form == GeneratorLoss::Saturating ? log_one_minus_fake
                                                 : -mean_of(d_fake, [](double s) { return std::log(s); });
  return out;
}

double combined_objective(double gan_term, double nn_term, double lambda) { return gan_term + lambda * nn_term; }

LossReport make_loss_report(const Tensor& generated, const Tensor& target, std::span<const double> d_real,
                            std::span<const double> d_fake, int n, double lambda, GeneratorLoss form) {
  LossReport report;
  report.n = n;
  report.lambda = lambda;
  report.l1 = l1_loss(generated, target);
  report.nn = nn_loss(generated, target, n);
  const GanLosses gan = gan_losses(d_real, d_fake, form);
  report.gan_d = gan.d_loss;
  report.gan_g = gan.g_loss;
  report.combined = combined_objective(report.gan_g, report.nn, lambda);
  return report;
}

}  // namespace deforma

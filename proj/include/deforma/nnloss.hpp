#pragma once

#include <span>

#include "deforma/tensor.hpp"

namespace deforma {

inline constexpr double kDefaultLambda = 0.01;
inline constexpr int kDefaultNeighbourhood = 3;

/// Nearest-neighbour loss: for every location p of `cx`, the smallest
/// channel-summed L1 distance to a location of `cy` within the n x n window
/// centred on p, summed over p. Not normalized by channels or pixels.
///
/// Shifted-tensor implementation. `cy` is padded once with a +inf sentinel
/// (the largest finite float) so each of the n^2 offsets is a plain shifted
/// view; per offset the difference map is channel-summed and folded into a
/// running per-location minimum, rows running in parallel.
double nn_loss_fast(const Tensor& cx, const Tensor& cy, int n);

/// Reference scan over locations, offsets and channels in double precision.
double nn_loss_bruteforce(const Tensor& cx, const Tensor& cy, int n);

double nn_loss(const Tensor& cx, const Tensor& cy, int n);

/// Unnormalized L1 distance. Uses the same per-location reduction as
/// nn_loss_fast, so nn_loss_fast(x, y, 1) == l1_loss(x, y) bit for bit.
double l1_loss(const Tensor& x, const Tensor& y);

/// Pixel-space feature extractor: the image itself.
inline const Tensor& pixel_features(const Tensor& image) { return image; }

struct GanLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

enum class GeneratorLoss { NonSaturating, Saturating };

/// Conditional adversarial loss evaluated on discriminator scores.
///   d_loss = -mean(log d_real) - mean(log(1 - d_fake))
///   g_loss = -mean(log d_fake)            (non-saturating, default)
///          =  mean(log(1 - d_fake))       (saturating)
/// Scores must lie strictly inside (0, 1); otherwise DomainError.
GanLosses gan_losses(std::span<const double> d_real, std::span<const double> d_fake,
                     GeneratorLoss form = GeneratorLoss::NonSaturating);

double combined_objective(double gan_term, double nn_term, double lambda = kDefaultLambda);

struct LossReport {
  double l1 = 0.0;
  double nn = 0.0;
  double gan_d = 0.0;
  double gan_g = 0.0;
  double combined = 0.0;  // gan_g + lambda * nn
  double lambda = kDefaultLambda;
  int n = kDefaultNeighbourhood;
};

/// All loss terms for one generated/target pair. `generated` and `target`
/// are feature tensors (pixel_features for pixel space).
LossReport make_loss_report(const Tensor& generated, const Tensor& target, std::span<const double> d_real,
                            std::span<const double> d_fake, int n = kDefaultNeighbourhood,
                            double lambda = kDefaultLambda, GeneratorLoss form = GeneratorLoss::NonSaturating);

}  // namespace deforma

#include "deforma/warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deforma/error.hpp"
#include "deforma/parallel.hpp"

namespace deforma {

namespace {

void require_mask_for(const Tensor& features, const Tensor& mask) {
  if (mask.channels() != 1 || mask.height() != features.height() || mask.width() != features.width()) {
    throw ShapeError("mask " + to_string(mask.shape()) + " does not fit features " + to_string(features.shape()));
  }
}

void require_stack(std::span<const Tensor> parts, const char* what) {
  if (parts.empty()) throw ShapeError(std::string(what) + ": empty tensor list");
  for (const Tensor& t : parts) require_same_shape(parts.front(), t, what);
}

Tensor apply_mask(const Tensor& features, const Tensor& mask) {
  Tensor masked = features;
  const std::size_t channels = features.channels();
  auto out = masked.values();
  auto m = mask.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) out[i * channels + c] *= m[i];
  }
  return masked;
}

Tensor sample_backward(const Tensor& source, const AffineTransform& inverse) {
  const std::size_t height = source.height(), width = source.width(), channels = source.channels();
  Tensor out(source.shape());
  parallel_for(height, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t row = row_begin; row < row_end; ++row) {
      for (std::size_t col = 0; col < width; ++col) {
        const Point2 src = apply_affine(inverse, {static_cast<double>(col), static_cast<double>(row)});
        const double fx = std::floor(src.x), fy = std::floor(src.y);
        const double wx = src.x - fx, wy = src.y - fy;
        const double x0 = fx, y0 = fy;
        // Taps with zero weight are skipped so integer positions copy the
        // source value exactly, sign of zero included.
        struct Tap {
          double x, y, w;
        };
        const Tap taps[4] = {{x0, y0, (1 - wx) * (1 - wy)},
                             {x0 + 1, y0, wx * (1 - wy)},
                             {x0, y0 + 1, (1 - wx) * wy},
                             {x0 + 1, y0 + 1, wx * wy}};
        auto dst = out.pixel(row, col);
        bool first = true;
        for (const Tap& tap : taps) {
          if (tap.w == 0.0) continue;
          if (tap.x < 0 || tap.y < 0 || tap.x > static_cast<double>(width - 1) ||
              tap.y > static_cast<double>(height - 1)) {
            continue;
          }
          const auto px = source.pixel(static_cast<std::size_t>(tap.y), static_cast<std::size_t>(tap.x));
          const auto w = static_cast<float>(tap.w);
          for (std::size_t c = 0; c < channels; ++c) {
            dst[c] = first ? px[c] * w : dst[c] + px[c] * w;
          }
          first = false;
        }
      }
    }
  });
  return out;
}

Tensor splat_forward(const Tensor& source, const Tensor& mask, const AffineTransform& t) {
  const std::size_t height = source.height(), width = source.width();
  Tensor out(source.shape());
  // Row-major scan; later source pixels overwrite earlier ones on collision.
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      if (mask.at(row, col) == 0.0f) continue;
      const Point2 dst = apply_affine(t, {static_cast<double>(col), static_cast<double>(row)});
      const double x = std::nearbyint(dst.x), y = std::nearbyint(dst.y);
      if (x < 0 || y < 0 || x > static_cast<double>(width - 1) || y > static_cast<double>(height - 1)) continue;
      const auto from = source.pixel(row, col);
      std::copy(from.begin(), from.end(), out.pixel(static_cast<std::size_t>(y), static_cast<std::size_t>(x)).begin());
    }
  }
  return out;
}

}  // namespace

std::size_t WarpPlan::active_parts() const {
  return static_cast<std::size_t>(
      std::count_if(parts.begin(), parts.end(), [](const PartWarp& p) { return p.transform.has_value(); }));
}

WarpPlan build_plan(const RegionSet& regions_a, const RegionSet& regions_b, Dims image_dims, Dims feature_dims) {
  if (feature_dims.height == 0 || feature_dims.width == 0 || image_dims.height == 0 || image_dims.width == 0) {
    throw DomainError("build_plan needs positive dimensions");
  }
  WarpPlan plan;
  plan.feature_dims = feature_dims;
  for (std::size_t h = 0; h < kNumParts; ++h) {
    PartWarp& part = plan.parts[h];
    part.mask = Tensor(feature_dims.height, feature_dims.width, 1);
    const Region& a = regions_a[h];
    const Region& b = regions_b[h];
    if (a.empty() || b.empty()) continue;
    Region src = a, dst = b;
    src.source_dims = dst.source_dims = image_dims;
    try {
      const AffineTransform fitted = fit_affine(*src.corners, *dst.corners);
      part.transform = rescale_affine(fitted, image_dims, feature_dims);
    } catch (const DegenerateError&) {
      continue;
    }
    part.mask = rasterize_mask(rescale_region(src, feature_dims), feature_dims.height, feature_dims.width);
  }
  return plan;
}

Tensor warp_feature(const Tensor& features, const Tensor& mask, const AffineTransform& t, Resampling mode) {
  require_mask_for(features, mask);
  const AffineTransform inverse = invert_affine(t);
  if (mode == Resampling::ForwardNearest) return splat_forward(features, mask, t);
  return sample_backward(apply_mask(features, mask), inverse);
}

Tensor merge_max(std::span<const Tensor> parts) {
  require_stack(parts, "merge_max");
  Tensor out = parts.front();
  auto acc = out.values();
  for (std::size_t h = 1; h < parts.size(); ++h) {
    auto v = parts[h].values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = std::max(acc[i], v[i]);
  }
  return out;
}

Tensor merge_average(std::span<const Tensor> parts) {
  require_stack(parts, "merge_average");
  Tensor out(parts.front().shape());
  auto dst = out.values();
  const double n = static_cast<double>(parts.size());
  for (std::size_t i = 0; i < dst.size(); ++i) {
    double sum = 0.0;
    for (const Tensor& t : parts) sum += t.values()[i];
    dst[i] = static_cast<float>(sum / n);
  }
  return out;
}

Tensor merge_linear(std::span<const Tensor> parts, std::span<const Tensor> weights) {
  require_stack(parts, "merge_linear");
  if (weights.size() != parts.size()) {
    throw ShapeError("merge_linear: " + std::to_string(weights.size()) + " weight maps for " +
                     std::to_string(parts.size()) + " parts");
  }
  const Shape& shape = parts.front().shape();
  for (const Tensor& w : weights) {
    if (w.channels() != 1 || w.height() != shape.height || w.width() != shape.width) {
      throw ShapeError("merge_linear: weight map " + to_string(w.shape()) + " does not fit " + to_string(shape));
    }
  }
  Tensor out(shape);
  const std::size_t locations = shape.height * shape.width;
  const std::size_t channels = shape.channels;
  std::vector<double> w(parts.size());
  for (std::size_t i = 0; i < locations; ++i) {
    double total = 0.0;
    for (std::size_t h = 0; h < parts.size(); ++h) {
      w[h] = weights[h].values()[i];
      total += w[h];
    }
    const double deviation = std::abs(total - 1.0);
    if (!(deviation <= kWeightSumRenormalize)) {
      throw WeightError("merge_linear: weights sum to " + std::to_string(total) + " at location " +
                        std::to_string(i));
    }
    if (deviation > kWeightSumExact) {
      for (double& v : w) v /= total;
    }
    for (std::size_t c = 0; c < channels; ++c) {
      double sum = 0.0;
      for (std::size_t h = 0; h < parts.size(); ++h) sum += w[h] * parts[h].values()[i * channels + c];
      out.values()[i * channels + c] = static_cast<float>(sum);
    }
  }
  return out;
}

Tensor deform(const Tensor& features, const WarpPlan& plan, const MergeStrategy& strategy, Resampling mode) {
  if (features.height() != plan.feature_dims.height || features.width() != plan.feature_dims.width) {
    throw ShapeError("deform: features " + to_string(features.shape()) + " do not match plan dims " +
                     std::to_string(plan.feature_dims.height) + "x" + std::to_string(plan.feature_dims.width));
  }
  std::vector<Tensor> warped(kNumParts);
  for (std::size_t h = 0; h < kNumParts; ++h) {
    const PartWarp& part = plan.parts[h];
    warped[h] = part.transform ? warp_feature(features, part.mask, *part.transform, mode) : Tensor(features.shape());
  }
  return std::visit(
      [&](const auto& s) -> Tensor {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MergeMax>) {
          return merge_max(warped);
        } else if constexpr (std::is_same_v<S, MergeAverage>) {
          return merge_average(warped);
        } else {
          return merge_linear(warped, s.weights);
        }
      },
      strategy);
}

}  // namespace deforma

#pragma once

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "deforma/affine.hpp"
#include "deforma/regions.hpp"
#include "deforma/tensor.hpp"

namespace deforma {

struct PartWarp {
  std::optional<AffineTransform> transform;  // source -> target, feature resolution
  Tensor mask;                               // source-space mask, feature resolution
};

struct WarpPlan {
  Dims feature_dims;
  std::array<PartWarp, kNumParts> parts;

  std::size_t active_parts() const;
};

/// Per-part transforms and masks for one feature resolution. Transforms are
/// fitted on image-resolution corners and then rescaled; masks are rasterized
/// from the rescaled source corners. Parts that are EMPTY in either pose, or
/// whose corners are degenerate, get no transform and a zero mask.
WarpPlan build_plan(const RegionSet& regions_a, const RegionSet& regions_b, Dims image_dims, Dims feature_dims);

enum class Resampling {
  BackwardBilinear,  // output(q) = bilinear sample of the masked input at t^-1(q)
  ForwardNearest,    // each masked source pixel is splatted to round(t(p))
};

/// One part's warp: (F * mask) moved by `t`, all channels sharing the
/// geometry. Samples outside the grid read as zero.
Tensor warp_feature(const Tensor& features, const Tensor& mask, const AffineTransform& t,
                    Resampling mode = Resampling::BackwardBilinear);

Tensor merge_max(std::span<const Tensor> parts);
Tensor merge_average(std::span<const Tensor> parts);

inline constexpr double kWeightSumExact = 1e-4;
inline constexpr double kWeightSumRenormalize = 1e-2;

/// Per-location convex combination. `weights[h]` is a single-channel map for
/// part h. Weight sums within 1e-4 of one are used as given, within 1e-2 they
/// are renormalized, otherwise WeightError.
Tensor merge_linear(std::span<const Tensor> parts, std::span<const Tensor> weights);

struct MergeMax {};
struct MergeAverage {};
struct MergeLinear {
  std::vector<Tensor> weights;
};
using MergeStrategy = std::variant<MergeMax, MergeAverage, MergeLinear>;

/// Warps `features` with every part of the plan and merges the results.
Tensor deform(const Tensor& features, const WarpPlan& plan, const MergeStrategy& strategy = MergeMax{},
              Resampling mode = Resampling::BackwardBilinear);

}  // namespace deforma

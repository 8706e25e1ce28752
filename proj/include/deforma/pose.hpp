#pragma once

#include <bitset>
#include <cstdint>

#include "deforma/keypoints.hpp"
#include "deforma/tensor.hpp"

namespace deforma {

inline constexpr double kDefaultHeatmapSigma = 6.0;

struct HeatmapOptions {
  double sigma = kDefaultHeatmapSigma;
  // false: exp(-|p - p_j| / sigma^2), the published form.
  // true:  exp(-|p - p_j|^2 / sigma^2).
  bool squared_distance = false;
};

/// 18-channel heatmap stack, one channel per joint, evaluated at every pixel
/// centre of a height x width grid. Missing joints give all-zero channels.
/// Throws DomainError for sigma <= 0 and ShapeError for empty dimensions.
Tensor encode_heatmaps(const Keypoints& kp, std::size_t height, std::size_t width,
                       const HeatmapOptions& options = {});

using JointSet = std::bitset<kNumJoints>;

namespace joint_sets {
JointSet arms();  // shoulders, elbows, wrists
JointSet legs();  // hips, knees, ankles
JointSet of(std::initializer_list<Joint> joints);
}  // namespace joint_sets

/// Adds independent N(0, sigma_noise^2) noise to both coordinates of every
/// selected joint that is present. Deterministic for a given seed.
Keypoints perturb_pose(const Keypoints& kp, double sigma_noise, const JointSet& selector,
                       std::uint64_t seed);

}  // namespace deforma

#include "deforma/pose.hpp"

#include <cmath>
#include <random>
#include <string>

#include "deforma/error.hpp"

namespace deforma {

Tensor encode_heatmaps(const Keypoints& kp, std::size_t height, std::size_t width,
                       const HeatmapOptions& options) {
  if (!(options.sigma > 0.0) || !std::isfinite(options.sigma)) {
    throw DomainError("heatmap sigma must be positive, got " + std::to_string(options.sigma));
  }
  Tensor maps(height, width, kNumJoints);
  const double inv_sigma2 = 1.0 / (options.sigma * options.sigma);
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const auto& joint = kp.joints[j];
    if (!joint) continue;
    for (std::size_t r = 0; r < height; ++r) {
      const double dy = static_cast<double>(r) - joint->y;
      for (std::size_t c = 0; c < width; ++c) {
        const double dx = static_cast<double>(c) - joint->x;
        const double d2 = dx * dx + dy * dy;
        const double d = options.squared_distance ? d2 : std::sqrt(d2);
        maps.at(r, c, j) = static_cast<float>(std::exp(-d * inv_sigma2));
      }
    }
  }
  return maps;
}

namespace joint_sets {

JointSet of(std::initializer_list<Joint> joints) {
  JointSet set;
  for (Joint j : joints) set.set(index_of(j));
  return set;
}

JointSet arms() {
  return of({Joint::RShoulder, Joint::RElbow, Joint::RWrist, Joint::LShoulder, Joint::LElbow, Joint::LWrist});
}

JointSet legs() {
  return of({Joint::RHip, Joint::RKnee, Joint::RAnkle, Joint::LHip, Joint::LKnee, Joint::LAnkle});
}

}  // namespace joint_sets

Keypoints perturb_pose(const Keypoints& kp, double sigma_noise, const JointSet& selector,
                       std::uint64_t seed) {
  if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise)) {
    throw DomainError("perturbation sigma must be >= 0, got " + std::to_string(sigma_noise));
  }
  Keypoints out = kp;
  if (sigma_noise == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma_noise);
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    if (!selector.test(j) || !out.joints[j]) continue;
    // x then y, joints in index order: the draw sequence is part of the
    // determinism contract.
    const double dx = noise(rng);
    const double dy = noise(rng);
    out.joints[j]->x += dx;
    out.joints[j]->y += dy;
  }
  return out;
}

}  // namespace deforma

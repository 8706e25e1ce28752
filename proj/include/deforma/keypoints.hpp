#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "deforma/geometry.hpp"

namespace deforma {

inline constexpr std::size_t kNumJoints = 18;

// OpenPose BODY-18 (COCO) joint order.
enum class Joint : std::size_t {
  Nose = 0,
  Neck,
  RShoulder,
  RElbow,
  RWrist,
  LShoulder,
  LElbow,
  LWrist,
  RHip,
  RKnee,
  RAnkle,
  LHip,
  LKnee,
  LAnkle,
  REye,
  LEye,
  REar,
  LEar,
};

constexpr std::size_t index_of(Joint j) { return static_cast<std::size_t>(j); }
std::string_view joint_name(std::size_t index);

/// The 18 joints of one person; a disengaged optional is a missing detection.
struct Keypoints {
  std::array<std::optional<Point2>, kNumJoints> joints{};

  std::optional<Point2>& operator[](Joint j) { return joints[index_of(j)]; }
  const std::optional<Point2>& operator[](Joint j) const { return joints[index_of(j)]; }
  std::size_t present_count() const;
  bool operator==(const Keypoints&) const = default;
};

}  // namespace deforma

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "deforma/keypoints.hpp"
#include "deforma/tensor.hpp"

namespace deforma {

// DFT1 tensor files: "DFT1", height/width/channels as little-endian u32, a
// zero flags byte, then the payload as little-endian f32 in HWC order.
inline constexpr std::size_t kTensorHeaderBytes = 17;

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

std::string encode_tensor(const Tensor& t);
Tensor decode_tensor(std::string_view bytes);

inline constexpr double kDefaultMinConfidence = 0.05;

/// Parses pose JSON: {"joints": [null | {"x":, "y":, "c"?}, ...18]}. Joints
/// whose confidence is below `min_confidence` are treated as missing.
Keypoints parse_pose(std::string_view json, double min_confidence = kDefaultMinConfidence);
Keypoints read_pose(const std::filesystem::path& path, double min_confidence = kDefaultMinConfidence);

std::string format_pose(const Keypoints& kp);
void write_pose(const Keypoints& kp, const std::filesystem::path& path);

/// Whole file as bytes; throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace deforma

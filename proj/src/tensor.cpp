#include "deforma/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "deforma/error.hpp"
#include "deforma/keypoints.hpp"

namespace deforma {

namespace {

void require_positive(const Shape& s) {
  if (s.height == 0 || s.width == 0 || s.channels == 0) {
    throw ShapeError("tensor dimensions must be positive, got " + to_string(s));
  }
}

}  // namespace

std::string to_string(const Shape& s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" + std::to_string(s.channels);
}

Tensor::Tensor(std::size_t height, std::size_t width, std::size_t channels, float fill)
    : Tensor(Shape{height, width, channels}, fill) {}

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
  require_positive(shape_);
  data_.assign(shape_.size(), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  require_positive(shape_);
  if (data_.size() != shape_.size()) {
    throw ShapeError("tensor " + to_string(shape_) + " needs " + std::to_string(shape_.size()) +
                     " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::channel(std::size_t c) const {
  Tensor out(height(), width(), 1);
  for (std::size_t r = 0; r < height(); ++r) {
    for (std::size_t col = 0; col < width(); ++col) out.at(r, col) = at(r, col, c);
  }
  return out;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

bool Tensor::bit_equal(const Tensor& other) const {
  return shape_ == other.shape_ &&
         (data_.empty() || std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

std::string_view joint_name(std::size_t index) {
  static constexpr std::string_view kNames[kNumJoints] = {
      "nose",      "neck",   "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
      "l_elbow",   "l_wrist", "r_hip",     "r_knee",  "r_ankle", "l_hip",
      "l_knee",    "l_ankle", "r_eye",     "l_eye",   "r_ear",   "l_ear"};
  return index < kNumJoints ? kNames[index] : std::string_view{"?"};
}

std::size_t Keypoints::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(joints.begin(), joints.end(), [](const auto& j) { return j.has_value(); }));
}

}  // namespace deforma

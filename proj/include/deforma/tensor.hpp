#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace deforma {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const { return height * width * channels; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

/// Dense height x width x channels array of floats, row-major HWC.
///
/// Element (row, col, c) lives at `(row * width + col) * channels + c`, so the
/// channel vector of one location is contiguous. Dimensions are always
/// positive and the buffer length always matches them.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t height, std::size_t width, std::size_t channels, float fill = 0.0f);
  explicit Tensor(Shape shape, float fill = 0.0f);
  /// Takes ownership of `data`; throws ShapeError if its length disagrees.
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t index(std::size_t row, std::size_t col, std::size_t c = 0) const {
    return (row * shape_.width + col) * shape_.channels + c;
  }
  float& at(std::size_t row, std::size_t col, std::size_t c = 0) { return data_[index(row, col, c)]; }
  float at(std::size_t row, std::size_t col, std::size_t c = 0) const { return data_[index(row, col, c)]; }

  /// Channel vector at one location.
  std::span<float> pixel(std::size_t row, std::size_t col) {
    return {data_.data() + index(row, col), shape_.channels};
  }
  std::span<const float> pixel(std::size_t row, std::size_t col) const {
    return {data_.data() + index(row, col), shape_.channels};
  }
  /// All `width * channels` values of one row.
  std::span<const float> row(std::size_t r) const {
    return {data_.data() + index(r, 0), shape_.width * shape_.channels};
  }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  /// Single-channel copy of channel `c`.
  Tensor channel(std::size_t c) const;

  bool all_finite() const;

  /// Bitwise equality, so -0.0 and +0.0 differ and NaN payloads compare.
  bool bit_equal(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Throws ShapeError unless `a` and `b` have identical shapes.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace deforma

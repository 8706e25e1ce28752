#pragma once

#include <array>
#include <span>

#include "deforma/geometry.hpp"

namespace deforma {

/// p -> A p + t with A = [[a11, a12], [a21, a22]].
struct AffineTransform {
  double a11 = 1.0, a12 = 0.0;
  double a21 = 0.0, a22 = 1.0;
  double tx = 0.0, ty = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double x, double y) { return {1.0, 0.0, 0.0, 1.0, x, y}; }

  double det() const { return a11 * a22 - a12 * a21; }
  bool operator==(const AffineTransform&) const = default;
};

inline constexpr double kDegenerateCondition = 1e12;
inline constexpr double kSingularDeterminant = 1e-9;

Point2 apply_affine(const AffineTransform& t, Point2 p);

/// `outer` after `inner`: p -> outer(inner(p)).
AffineTransform compose(const AffineTransform& outer, const AffineTransform& inner);

/// Least-squares affine map sending src[j] to dst[j]. Throws DegenerateError
/// when the source points do not span the plane (condition > 1e12).
AffineTransform fit_affine(std::span<const Point2> src, std::span<const Point2> dst);

/// Conjugates `t` by the axis scaling from `from` to `to` pixel grids.
AffineTransform rescale_affine(const AffineTransform& t, Dims from, Dims to);

/// Throws SingularError when |det A| <= 1e-9.
AffineTransform invert_affine(const AffineTransform& t);

/// Sum of squared residuals of `t` on the correspondences.
double fit_residual(const AffineTransform& t, std::span<const Point2> src, std::span<const Point2> dst);

}  // namespace deforma

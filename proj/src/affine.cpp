#include "deforma/affine.hpp"

#include <cmath>
#include <string>

#include "deforma/error.hpp"

namespace deforma {

Point2 apply_affine(const AffineTransform& t, Point2 p) {
  return {t.a11 * p.x + t.a12 * p.y + t.tx, t.a21 * p.x + t.a22 * p.y + t.ty};
}

AffineTransform compose(const AffineTransform& g, const AffineTransform& f) {
  return {g.a11 * f.a11 + g.a12 * f.a21, g.a11 * f.a12 + g.a12 * f.a22,
          g.a21 * f.a11 + g.a22 * f.a21, g.a21 * f.a12 + g.a22 * f.a22,
          g.a11 * f.tx + g.a12 * f.ty + g.tx, g.a21 * f.tx + g.a22 * f.ty + g.ty};
}

// The two output rows decouple and share one normal matrix. With both point
// sets centred on their centroids the translation drops out, leaving the 2x2
// scatter S of the source points:
//   [a_r1 a_r2] = (sum_j q_r,j * p_j^T) S^-1,   t = centroid(q) - A centroid(p).
AffineTransform fit_affine(std::span<const Point2> src, std::span<const Point2> dst) {
  if (src.size() != dst.size()) {
    throw DomainError("fit_affine needs matching point counts, got " + std::to_string(src.size()) + " and " +
                      std::to_string(dst.size()));
  }
  if (src.size() < 3) throw DegenerateError("fit_affine needs at least 3 correspondences");
  const double n = static_cast<double>(src.size());
  Point2 cp, cq;
  for (std::size_t j = 0; j < src.size(); ++j) {
    cp = cp + src[j];
    cq = cq + dst[j];
  }
  cp = (1.0 / n) * cp;
  cq = (1.0 / n) * cq;

  double sxx = 0, sxy = 0, syy = 0;
  double bxx = 0, bxy = 0, byx = 0, byy = 0;
  for (std::size_t j = 0; j < src.size(); ++j) {
    const Point2 p = src[j] - cp;
    const Point2 q = dst[j] - cq;
    sxx += p.x * p.x;
    sxy += p.x * p.y;
    syy += p.y * p.y;
    bxx += q.x * p.x;
    bxy += q.x * p.y;
    byx += q.y * p.x;
    byy += q.y * p.y;
  }

  const double trace = sxx + syy;
  const double spread = std::hypot(sxx - syy, 2.0 * sxy);
  const double lambda_max = 0.5 * (trace + spread);
  const double det = sxx * syy - sxy * sxy;
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw DegenerateError("source points are coincident");
  }
  const double lambda_min = det / lambda_max;
  if (!(lambda_min > 0.0) || lambda_max / lambda_min > kDegenerateCondition) {
    throw DegenerateError("source points are collinear (normal matrix condition above 1e12)");
  }

  const double inv = 1.0 / det;
  const double i11 = syy * inv, i12 = -sxy * inv, i22 = sxx * inv;
  AffineTransform t;
  t.a11 = bxx * i11 + bxy * i12;
  t.a12 = bxx * i12 + bxy * i22;
  t.a21 = byx * i11 + byy * i12;
  t.a22 = byx * i12 + byy * i22;
  t.tx = cq.x - (t.a11 * cp.x + t.a12 * cp.y);
  t.ty = cq.y - (t.a21 * cp.x + t.a22 * cp.y);
  return t;
}

AffineTransform rescale_affine(const AffineTransform& t, Dims from, Dims to) {
  if (from.height == 0 || from.width == 0 || to.height == 0 || to.width == 0) {
    throw DomainError("rescale_affine needs positive dimensions");
  }
  if (from == to) return t;
  const double sx = static_cast<double>(to.width) / static_cast<double>(from.width);
  const double sy = static_cast<double>(to.height) / static_cast<double>(from.height);
  // S A S^-1 with S = diag(sx, sy); translation S t.
  return {t.a11, t.a12 * sx / sy, t.a21 * sy / sx, t.a22, sx * t.tx, sy * t.ty};
}

AffineTransform invert_affine(const AffineTransform& t) {
  const double det = t.det();
  if (!(std::abs(det) > kSingularDeterminant)) {
    throw SingularError("affine transform is singular (|det A| = " + std::to_string(std::abs(det)) + ")");
  }
  const double inv = 1.0 / det;
  AffineTransform r;
  r.a11 = t.a22 * inv;
  r.a12 = -t.a12 * inv;
  r.a21 = -t.a21 * inv;
  r.a22 = t.a11 * inv;
  r.tx = -(r.a11 * t.tx + r.a12 * t.ty);
  r.ty = -(r.a21 * t.tx + r.a22 * t.ty);
  return r;
}

double fit_residual(const AffineTransform& t, std::span<const Point2> src, std::span<const Point2> dst) {
  double sum = 0.0;
  for (std::size_t j = 0; j < src.size() && j < dst.size(); ++j) {
    const Point2 d = dst[j] - apply_affine(t, src[j]);
    sum += dot(d, d);
  }
  return sum;
}

}  // namespace deforma

#include "deforma/regions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deforma/error.hpp"

namespace deforma {

namespace {

constexpr std::array<std::string_view, kNumParts> kPartNames = {"head",  "torso", "luarm", "llarm", "ruarm",
                                                                "rlarm", "luleg", "llleg", "ruleg", "rlleg"};

std::optional<Quad> head_box(const Keypoints& kp, const RegionConfig& cfg) {
  std::size_t count = 0;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  for (Joint j : cfg.head_joints) {
    const auto& p = kp[j];
    if (!p) continue;
    if (count++ == 0) {
      x0 = x1 = p->x;
      y0 = y1 = p->y;
    } else {
      x0 = std::min(x0, p->x);
      x1 = std::max(x1, p->x);
      y0 = std::min(y0, p->y);
      y1 = std::max(y1, p->y);
    }
  }
  if (count < cfg.min_head_joints || count == 0) return std::nullopt;
  return Quad{Point2{x0, y0}, Point2{x0, y1}, Point2{x1, y1}, Point2{x1, y0}};
}

std::optional<Quad> limb_rect(const Keypoints& kp, Part part, double width) {
  const auto [proximal, distal] = limb_joints(part);
  const auto& a = kp[proximal];
  const auto& b = kp[distal];
  if (!a || !b) return std::nullopt;
  const Point2 axis = *b - *a;
  const double length = norm(axis);
  if (!(length > 0.0)) return std::nullopt;
  const Point2 u = (1.0 / length) * axis;
  const Point2 n{-u.y, u.x};
  const Point2 half = (0.5 * width) * n;
  return Quad{*a + half, *b + half, *b - half, *a - half};
}

}  // namespace

std::string_view part_name(Part p) { return kPartNames[index_of(p)]; }

Part part_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumParts; ++i) {
    if (kPartNames[i] == name) return kAllParts[i];
  }
  throw DomainError("unknown body part \"" + std::string(name) + "\"");
}

bool is_limb(Part p) { return p != Part::Head && p != Part::Torso; }

Part mirror_part(Part p) {
  switch (p) {
    case Part::LUArm: return Part::RUArm;
    case Part::LLArm: return Part::RLArm;
    case Part::RUArm: return Part::LUArm;
    case Part::RLArm: return Part::LLArm;
    case Part::LULeg: return Part::RULeg;
    case Part::LLLeg: return Part::RLLeg;
    case Part::RULeg: return Part::LULeg;
    case Part::RLLeg: return Part::LLLeg;
    default: return p;
  }
}

std::array<Joint, 2> limb_joints(Part p) {
  switch (p) {
    case Part::LUArm: return {Joint::LShoulder, Joint::LElbow};
    case Part::LLArm: return {Joint::LElbow, Joint::LWrist};
    case Part::RUArm: return {Joint::RShoulder, Joint::RElbow};
    case Part::RLArm: return {Joint::RElbow, Joint::RWrist};
    case Part::LULeg: return {Joint::LHip, Joint::LKnee};
    case Part::LLLeg: return {Joint::LKnee, Joint::LAnkle};
    case Part::RULeg: return {Joint::RHip, Joint::RKnee};
    case Part::RLLeg: return {Joint::RKnee, Joint::RAnkle};
    default: throw DomainError("part \"" + std::string(part_name(p)) + "\" is not a limb");
  }
}

double limb_width(const Keypoints& kp, std::size_t height, const RegionConfig& cfg) {
  std::size_t count = 0;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  for (Joint j : cfg.torso_anchor_joints) {
    const auto& p = kp[j];
    if (!p) continue;
    if (count++ == 0) {
      x0 = x1 = p->x;
      y0 = y1 = p->y;
    } else {
      x0 = std::min(x0, p->x);
      x1 = std::max(x1, p->x);
      y0 = std::min(y0, p->y);
      y1 = std::max(y1, p->y);
    }
  }
  // Both diagonals of the box have the same length, so their mean is either.
  const double diagonal = std::hypot(x1 - x0, y1 - y0);
  if (count < cfg.min_torso_anchors || !(diagonal > 0.0)) {
    return cfg.fallback_width_fraction * static_cast<double>(height);
  }
  return diagonal / 3.0;
}

RegionSet decompose(const Keypoints& kp, std::size_t height, std::size_t width, const RegionConfig& cfg) {
  if (height == 0 || width == 0) throw DomainError("decompose needs positive image dimensions");
  const Dims dims{height, width};
  RegionSet regions;
  for (Part p : kAllParts) regions[index_of(p)] = Region{p, std::nullopt, dims};

  regions[index_of(Part::Head)].corners = head_box(kp, cfg);

  const bool any_anchor = std::any_of(cfg.torso_anchor_joints.begin(), cfg.torso_anchor_joints.end(),
                                      [&](Joint j) { return kp[j].has_value(); });
  if (any_anchor) {
    const double w = static_cast<double>(width), h = static_cast<double>(height);
    regions[index_of(Part::Torso)].corners = Quad{Point2{0, 0}, Point2{w, 0}, Point2{w, h}, Point2{0, h}};
  }

  const double limb_w = limb_width(kp, height, cfg);
  for (Part p : kAllParts) {
    if (is_limb(p)) regions[index_of(p)].corners = limb_rect(kp, p, limb_w);
  }
  return regions;
}

Tensor rasterize_mask(const Region& r, std::size_t height, std::size_t width) {
  Tensor mask(height, width, 1);
  if (r.empty()) return mask;
  const Quad& q = *r.corners;

  double x0 = q[0].x, x1 = q[0].x, y0 = q[0].y, y1 = q[0].y;
  for (const Point2& c : q) {
    x0 = std::min(x0, c.x);
    x1 = std::max(x1, c.x);
    y0 = std::min(y0, c.y);
    y1 = std::max(y1, c.y);
  }
  const double max_col = static_cast<double>(width) - 1.0;
  const double max_row = static_cast<double>(height) - 1.0;
  if (x1 < 0.0 || y1 < 0.0 || x0 > max_col || y0 > max_row) return mask;
  const auto c_begin = static_cast<std::size_t>(std::ceil(std::max(0.0, x0)));
  const auto c_end = static_cast<std::size_t>(std::floor(std::min(max_col, x1)));
  const auto r_begin = static_cast<std::size_t>(std::ceil(std::max(0.0, y0)));
  const auto r_end = static_cast<std::size_t>(std::floor(std::min(max_row, y1)));

  // Convex quad: the point is inside iff it is on the same side of all four
  // edges (zero allowed). The tolerance is relative to each edge's length.
  std::array<Point2, 4> edge;
  std::array<double, 4> tol;
  double orientation = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    edge[k] = q[(k + 1) % 4] - q[k];
    tol[k] = 1e-9 * std::max(1.0, norm(edge[k]));
    orientation += cross(q[k], q[(k + 1) % 4]);
  }
  const double sign = orientation < 0.0 ? -1.0 : 1.0;

  for (std::size_t row = r_begin; row <= r_end; ++row) {
    for (std::size_t col = c_begin; col <= c_end; ++col) {
      const Point2 p{static_cast<double>(col), static_cast<double>(row)};
      bool inside = true;
      for (std::size_t k = 0; k < 4 && inside; ++k) {
        inside = sign * cross(edge[k], p - q[k]) >= -tol[k];
      }
      if (inside) mask.at(row, col) = 1.0f;
    }
  }
  return mask;
}

RegionSet apply_symmetry(const RegionSet& a, const RegionSet& b) {
  RegionSet out = a;
  for (Part p : kAllParts) {
    if (!is_limb(p)) continue;
    const std::size_t h = index_of(p);
    const std::size_t twin = index_of(mirror_part(p));
    if (a[h].empty() && !b[h].empty() && !a[twin].empty()) out[h].corners = a[twin].corners;
  }
  return out;
}

Region rescale_region(const Region& r, Dims to) {
  Region out = r;
  out.source_dims = to;
  if (r.empty() || r.source_dims == to) return out;
  const double sx = static_cast<double>(to.width) / static_cast<double>(r.source_dims.width);
  const double sy = static_cast<double>(to.height) / static_cast<double>(r.source_dims.height);
  for (Point2& c : *out.corners) c = {sx * c.x, sy * c.y};
  return out;
}

}  // namespace deforma

#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "deforma/keypoints.hpp"
#include "deforma/tensor.hpp"

namespace deforma {

inline constexpr std::size_t kNumParts = 10;

enum class Part : std::size_t { Head = 0, Torso, LUArm, LLArm, RUArm, RLArm, LULeg, LLLeg, RULeg, RLLeg };

constexpr std::size_t index_of(Part p) { return static_cast<std::size_t>(p); }
inline constexpr std::array<Part, kNumParts> kAllParts = {Part::Head,  Part::Torso, Part::LUArm, Part::LLArm,
                                                          Part::RUArm, Part::RLArm, Part::LULeg, Part::LLLeg,
                                                          Part::RULeg, Part::RLLeg};

/// Lower-case identifier used in files and on the command line ("luarm").
std::string_view part_name(Part p);
/// Throws DomainError for unknown names.
Part part_from_name(std::string_view name);

bool is_limb(Part p);
/// Left/right twin of a limb; head and torso are their own twin.
Part mirror_part(Part p);
/// Proximal and distal joint of a limb.
std::array<Joint, 2> limb_joints(Part p);

using Quad = std::array<Point2, 4>;

struct Region {
  Part part = Part::Head;
  std::optional<Quad> corners;  // nullopt: EMPTY
  Dims source_dims;

  bool empty() const { return !corners.has_value(); }
  bool operator==(const Region&) const = default;
};

using RegionSet = std::array<Region, kNumParts>;

struct RegionConfig {
  std::vector<Joint> head_joints = {Joint::Nose, Joint::Neck, Joint::REye, Joint::LEye, Joint::REar, Joint::LEar};
  std::vector<Joint> torso_anchor_joints = {Joint::RShoulder, Joint::LShoulder, Joint::RHip, Joint::LHip};
  std::size_t min_head_joints = 2;
  std::size_t min_torso_anchors = 2;
  // Limb width as a fraction of image height when the anchor box is unusable.
  double fallback_width_fraction = 0.15;
};

/// Width of every limb rectangle: one third of the mean diagonal of the
/// axis-aligned box around the present torso anchors.
double limb_width(const Keypoints& kp, std::size_t height, const RegionConfig& cfg = {});

/// The 10 part regions in canonical order.
///
/// Corner order is counter-clockwise on screen (y pointing down). Limbs start
/// at the corner beside their proximal joint, so corner j of a limb in one
/// pose corresponds to corner j of the same limb in another. The head box
/// starts at its top-left corner; the torso is (0,0), (W,0), (W,H), (0,H).
RegionSet decompose(const Keypoints& kp, std::size_t height, std::size_t width, const RegionConfig& cfg = {});

/// Single-channel 0/1 mask: a pixel is set iff its centre lies inside or on
/// the quadrilateral. EMPTY regions give all zeros.
Tensor rasterize_mask(const Region& r, std::size_t height, std::size_t width);

/// Fills EMPTY limbs of `a` from their twin in `a`, provided the limb is
/// present in `b`. Head and torso are never substituted.
RegionSet apply_symmetry(const RegionSet& a, const RegionSet& b);

/// Region with corners scaled from its source grid to `to`.
Region rescale_region(const Region& r, Dims to);

}  // namespace deforma

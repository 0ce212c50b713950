#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tnav/common.hpp"

namespace tnav::rs {

// Shortest bounded-curvature path with cusps between two planar poses,
// computed over the canonical 18 path templates (CSC, CCC, CCCC, CCSC,
// CCSCC under reflection/time-flip/reversal). Segment lengths are signed
// (negative = reverse gear) and normalized by the turning radius.
enum class SegType : std::uint8_t { kNop = 0, kLeft, kStraight, kRight };

struct Path {
  std::array<SegType, 5> type{SegType::kNop, SegType::kNop, SegType::kNop,
                              SegType::kNop, SegType::kNop};
  std::array<double, 5> length{0, 0, 0, 0, 0};  // signed, radius-normalized
  double total = std::numeric_limits<double>::infinity();  // sum of |length|

  bool valid() const { return std::isfinite(total); }
};

// Shortest path from `from` to `to` with the given minimum turning radius.
Path solve(const Pose2& from, const Pose2& to, double radius);

// Arc length of the shortest path, in world units.
double distance(const Pose2& from, const Pose2& to, double radius);

// Pose and gear after driving `s` world-units of arc length along the path
// (s clamped to [0, radius * path.total]). gear is +1 forward, -1 reverse,
// taken from the segment that contains s.
struct Sample {
  Pose2 pose;
  int gear = 1;
};
Sample interpolate(const Pose2& from, const Path& path, double s, double radius);

}  // namespace tnav::rs

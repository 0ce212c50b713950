#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace tnav {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps an angle to (-pi, pi]. Exact at the boundary: wrap(pi) == pi,
// wrap(-pi) == pi.
inline double wrap_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

// Smallest signed difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

inline double square(double v) { return v * v; }

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Planar pose. `heading` is the vehicle yaw in radians, kept in (-pi, pi]
// by every function that produces poses.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

inline double distance(const Pose2& a, const Pose2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace tnav

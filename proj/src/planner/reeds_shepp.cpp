#include "tnav/planner/reeds_shepp.hpp"

#include <cmath>
#include <limits>

#include "tnav/errors.hpp"

// Closed-form shortest-path templates for a bounded-curvature vehicle with
// reverse gear (Reeds-Shepp metric). Template functions solve the canonical
// L+S+L+, L+S+R+, L+R-L+, L+R+L-R-, L+R-L-R+, L+R-S-L-, L+R-S-R- and
// L+R-S-L-R+ words in normalized coordinates (unit turning radius, start at
// the origin); reflection, time-flip and reversal generate the full 48-word
// family. Segment sign conventions follow the classic formulation: lengths
// are signed, fixed quarter-turn arcs appear as +-pi/2 entries.

namespace tnav::rs {

namespace {

constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();
constexpr double kHalfPi = kPi / 2.0;

// Wrap to [-pi, pi).
double mod2pi(double x) {
  double v = std::fmod(x, kTwoPi);
  if (v < -kPi)
    v += kTwoPi;
  else if (v >= kPi)
    v -= kTwoPi;
  return v;
}

void polar(double x, double y, double& r, double& theta) {
  r = std::sqrt(x * x + y * y);
  theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi,
               double& tau, double& omega) {
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0.0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

bool LpSpLp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) return true;
  }
  return false;
}

bool LpSpRp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1, u1;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

bool LpRmL(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double u1, theta;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

bool LpRupLumRm(double x, double y, double phi, double& t, double& u,
                double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

bool LpRumLumRp(double x, double y, double phi, double& t, double& u,
                double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -kHalfPi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

bool LpRmSmLm(double x, double y, double phi, double& t, double& u,
              double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - 0.5 * kPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool LpRmSmRm(double x, double y, double phi, double& t, double& u,
              double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + 0.5 * kPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool LpRmSLmRp(double x, double y, double phi, double& t, double& u,
               double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(
          std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

using T = SegType;
constexpr T N = T::kNop, L = T::kLeft, S = T::kStraight, R = T::kRight;

// Canonical template table; rows referenced by index below.
constexpr std::array<std::array<T, 5>, 18> kTemplates = {{
    {L, R, L, N, N},  // 0
    {R, L, R, N, N},  // 1
    {L, R, L, R, N},  // 2
    {R, L, R, L, N},  // 3
    {L, R, S, L, N},  // 4
    {R, L, S, R, N},  // 5
    {L, S, R, L, N},  // 6
    {R, S, L, R, N},  // 7
    {L, R, S, R, N},  // 8
    {R, L, S, L, N},  // 9
    {R, S, R, L, N},  // 10
    {L, S, L, R, N},  // 11
    {L, S, R, N, N},  // 12
    {R, S, L, N, N},  // 13
    {L, S, L, N, N},  // 14
    {R, S, R, N, N},  // 15
    {L, R, S, L, R},  // 16
    {R, L, S, R, L},  // 17
}};

void consider(Path& best, int row, double l0, double l1, double l2,
              double l3 = 0.0, double l4 = 0.0) {
  const double total =
      std::fabs(l0) + std::fabs(l1) + std::fabs(l2) + std::fabs(l3) + std::fabs(l4);
  if (total >= best.total) return;
  best.type = kTemplates[row];
  best.length = {l0, l1, l2, l3, l4};
  best.total = total;
}

void CSC(double x, double y, double phi, Path& best) {
  double t, u, v;
  if (LpSpLp(x, y, phi, t, u, v)) consider(best, 14, t, u, v);
  if (LpSpLp(-x, y, -phi, t, u, v)) consider(best, 14, -t, -u, -v);
  if (LpSpLp(x, -y, -phi, t, u, v)) consider(best, 15, t, u, v);
  if (LpSpLp(-x, -y, phi, t, u, v)) consider(best, 15, -t, -u, -v);
  if (LpSpRp(x, y, phi, t, u, v)) consider(best, 12, t, u, v);
  if (LpSpRp(-x, y, -phi, t, u, v)) consider(best, 12, -t, -u, -v);
  if (LpSpRp(x, -y, -phi, t, u, v)) consider(best, 13, t, u, v);
  if (LpSpRp(-x, -y, phi, t, u, v)) consider(best, 13, -t, -u, -v);
}

void CCC(double x, double y, double phi, Path& best) {
  double t, u, v;
  if (LpRmL(x, y, phi, t, u, v)) consider(best, 0, t, u, v);
  if (LpRmL(-x, y, -phi, t, u, v)) consider(best, 0, -t, -u, -v);
  if (LpRmL(x, -y, -phi, t, u, v)) consider(best, 1, t, u, v);
  if (LpRmL(-x, -y, phi, t, u, v)) consider(best, 1, -t, -u, -v);
  // Reversed problem covers the C|CC words.
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (LpRmL(xb, yb, phi, t, u, v)) consider(best, 0, v, u, t);
  if (LpRmL(-xb, yb, -phi, t, u, v)) consider(best, 0, -v, -u, -t);
  if (LpRmL(xb, -yb, -phi, t, u, v)) consider(best, 1, v, u, t);
  if (LpRmL(-xb, -yb, phi, t, u, v)) consider(best, 1, -v, -u, -t);
}

void CCCC(double x, double y, double phi, Path& best) {
  double t, u, v;
  if (LpRupLumRm(x, y, phi, t, u, v)) consider(best, 2, t, u, -u, v);
  if (LpRupLumRm(-x, y, -phi, t, u, v)) consider(best, 2, -t, -u, u, -v);
  if (LpRupLumRm(x, -y, -phi, t, u, v)) consider(best, 3, t, u, -u, v);
  if (LpRupLumRm(-x, -y, phi, t, u, v)) consider(best, 3, -t, -u, u, -v);
  if (LpRumLumRp(x, y, phi, t, u, v)) consider(best, 2, t, u, u, v);
  if (LpRumLumRp(-x, y, -phi, t, u, v)) consider(best, 2, -t, -u, -u, -v);
  if (LpRumLumRp(x, -y, -phi, t, u, v)) consider(best, 3, t, u, u, v);
  if (LpRumLumRp(-x, -y, phi, t, u, v)) consider(best, 3, -t, -u, -u, -v);
}

void CCSC(double x, double y, double phi, Path& best) {
  double t, u, v;
  if (LpRmSmLm(x, y, phi, t, u, v)) consider(best, 4, t, -kHalfPi, u, v);
  if (LpRmSmLm(-x, y, -phi, t, u, v)) consider(best, 4, -t, kHalfPi, -u, -v);
  if (LpRmSmLm(x, -y, -phi, t, u, v)) consider(best, 5, t, -kHalfPi, u, v);
  if (LpRmSmLm(-x, -y, phi, t, u, v)) consider(best, 5, -t, kHalfPi, -u, -v);
  if (LpRmSmRm(x, y, phi, t, u, v)) consider(best, 8, t, -kHalfPi, u, v);
  if (LpRmSmRm(-x, y, -phi, t, u, v)) consider(best, 8, -t, kHalfPi, -u, -v);
  if (LpRmSmRm(x, -y, -phi, t, u, v)) consider(best, 9, t, -kHalfPi, u, v);
  if (LpRmSmRm(-x, -y, phi, t, u, v)) consider(best, 9, -t, kHalfPi, -u, -v);
  // Reversed problem covers the CSC-then-turn mirror words.
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (LpRmSmLm(xb, yb, phi, t, u, v)) consider(best, 6, v, u, -kHalfPi, t);
  if (LpRmSmLm(-xb, yb, -phi, t, u, v)) consider(best, 6, -v, -u, kHalfPi, -t);
  if (LpRmSmLm(xb, -yb, -phi, t, u, v)) consider(best, 7, v, u, -kHalfPi, t);
  if (LpRmSmLm(-xb, -yb, phi, t, u, v)) consider(best, 7, -v, -u, kHalfPi, -t);
  if (LpRmSmRm(xb, yb, phi, t, u, v)) consider(best, 10, v, u, -kHalfPi, t);
  if (LpRmSmRm(-xb, yb, -phi, t, u, v)) consider(best, 10, -v, -u, kHalfPi, -t);
  if (LpRmSmRm(xb, -yb, -phi, t, u, v)) consider(best, 11, v, u, -kHalfPi, t);
  if (LpRmSmRm(-xb, -yb, phi, t, u, v)) consider(best, 11, -v, -u, kHalfPi, -t);
}

void CCSCC(double x, double y, double phi, Path& best) {
  double t, u, v;
  if (LpRmSLmRp(x, y, phi, t, u, v))
    consider(best, 16, t, -kHalfPi, u, -kHalfPi, v);
  if (LpRmSLmRp(-x, y, -phi, t, u, v))
    consider(best, 16, -t, kHalfPi, -u, kHalfPi, -v);
  if (LpRmSLmRp(x, -y, -phi, t, u, v))
    consider(best, 17, t, -kHalfPi, u, -kHalfPi, v);
  if (LpRmSLmRp(-x, -y, phi, t, u, v))
    consider(best, 17, -t, kHalfPi, -u, kHalfPi, -v);
}

}  // namespace

Path solve(const Pose2& from, const Pose2& to, double radius) {
  TNAV_REQUIRE(radius > 0.0, "turning radius must be positive");
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double c = std::cos(from.heading);
  const double s = std::sin(from.heading);
  const double x = (c * dx + s * dy) / radius;
  const double y = (-s * dx + c * dy) / radius;
  const double phi = mod2pi(to.heading - from.heading);
  Path best;
  CSC(x, y, phi, best);
  CCC(x, y, phi, best);
  CCCC(x, y, phi, best);
  CCSC(x, y, phi, best);
  CCSCC(x, y, phi, best);
  return best;
}

double distance(const Pose2& from, const Pose2& to, double radius) {
  return radius * solve(from, to, radius).total;
}

Sample interpolate(const Pose2& from, const Path& path, double s,
                   double radius) {
  TNAV_REQUIRE(path.valid(), "interpolate on invalid path");
  double seg = clamp(s / radius, 0.0, path.total);
  Sample out;
  out.pose = Pose2{0.0, 0.0, from.heading};
  for (int i = 0; i < 5 && path.type[i] != SegType::kNop; ++i) {
    if (path.length[i] == 0.0) continue;
    out.gear = path.length[i] > 0.0 ? 1 : -1;
    break;
  }
  for (int i = 0; i < 5 && seg > 0.0; ++i) {
    double v;
    if (path.length[i] < 0.0) {
      v = std::max(-seg, path.length[i]);
      seg += v;
    } else {
      v = std::min(seg, path.length[i]);
      seg -= v;
    }
    if (v != 0.0) out.gear = (path.length[i] < 0.0) ? -1 : 1;
    const double phi = out.pose.heading;
    switch (path.type[i]) {
      case SegType::kLeft:
        out.pose.x += std::sin(phi + v) - std::sin(phi);
        out.pose.y += -std::cos(phi + v) + std::cos(phi);
        out.pose.heading = phi + v;
        break;
      case SegType::kRight:
        out.pose.x += -std::sin(phi - v) + std::sin(phi);
        out.pose.y += std::cos(phi - v) - std::cos(phi);
        out.pose.heading = phi - v;
        break;
      case SegType::kStraight:
        out.pose.x += v * std::cos(phi);
        out.pose.y += v * std::sin(phi);
        break;
      case SegType::kNop:
        break;
    }
  }
  out.pose.x = out.pose.x * radius + from.x;
  out.pose.y = out.pose.y * radius + from.y;
  out.pose.heading = wrap_angle(out.pose.heading);
  return out;
}

}  // namespace tnav::rs

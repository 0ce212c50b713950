#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace tnav::kernels {

void MomentField::resize(int r, int c) {
  rows = r;
  cols = c;
  const std::size_t count = static_cast<std::size_t>(r) * c;
  for (auto* v : {&n, &sx, &sy, &sz, &sxx, &sxy, &sxz, &syy, &syz, &szz})
    v->assign(count, 0.0);
}

}  // namespace tnav::kernels

namespace tnav::kernels::detail {

// Both backends iterate the window offsets (dr, dc) row-major, so every
// output accumulator sees contributions in the same order; see kernels.hpp.
void window_moments_scalar(const double* heights, int rows, int cols, int side,
                           double cell, double z_ref, MomentField& out) {
  out.resize(rows, cols);
  const int half = side / 2;
  for (int dr = -half; dr <= half; ++dr) {
    const double y = dr * cell;
    const double yy = y * y;
    const int r0 = std::max(0, -dr);
    const int r1 = std::min(rows, rows - dr);
    for (int dc = -half; dc <= half; ++dc) {
      const double x = dc * cell;
      const double xx = x * x;
      const double xy = x * y;
      const int c0 = std::max(0, -dc);
      const int c1 = std::min(cols, cols - dc);
      for (int r = r0; r < r1; ++r) {
        const double* src = heights + static_cast<std::size_t>(r + dr) * cols + dc;
        const std::size_t base = static_cast<std::size_t>(r) * cols;
        for (int c = c0; c < c1; ++c) {
          const double z = src[c];
          if (std::isnan(z)) continue;
          const double zz = z - z_ref;
          const std::size_t i = base + c;
          out.n[i] += 1.0;
          out.sx[i] += x;
          out.sy[i] += y;
          out.sz[i] += zz;
          out.sxx[i] += xx;
          out.sxy[i] += xy;
          out.sxz[i] += x * zz;
          out.syy[i] += yy;
          out.syz[i] += y * zz;
          out.szz[i] += zz * zz;
        }
      }
    }
  }
}

void window_box_sum_scalar(const double* values, int rows, int cols, int side,
                           double* out) {
  const std::size_t sz = static_cast<std::size_t>(rows) * cols;
  std::fill(out, out + sz, 0.0);
  const int half = side / 2;
  for (int dr = -half; dr <= half; ++dr) {
    const int r0 = std::max(0, -dr);
    const int r1 = std::min(rows, rows - dr);
    for (int dc = -half; dc <= half; ++dc) {
      const int c0 = std::max(0, -dc);
      const int c1 = std::min(cols, cols - dc);
      for (int r = r0; r < r1; ++r) {
        const double* src = values + static_cast<std::size_t>(r + dr) * cols + dc;
        double* dst = out + static_cast<std::size_t>(r) * cols;
        for (int c = c0; c < c1; ++c) dst[c] += src[c];
      }
    }
  }
}

void weighted_sum3_scalar(const double* a, const double* b, const double* c,
                          double wa, double wb, double wc, double* out,
                          std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    out[i] = (wa * a[i] + wb * b[i]) + wc * c[i];
}

double mean_abs_diff_scalar(const double* a, const double* b,
                            std::size_t count) {
  if (count == 0) return 0.0;
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < count; ++i)
    acc[i & 3] += std::fabs(a[i] - b[i]);
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) / static_cast<double>(count);
}

namespace {
constexpr double kTwoPiC = 6.283185307179586476925286766559;
constexpr double kInvTwoPiC = 1.0 / kTwoPiC;
}  // namespace

void step_cost_scalar(const double* x, const double* y, const double* th,
                      const double* zeta, const double* omega,
                      const double* r_scale, const double* xd,
                      const double* yd, const double* thd, const double* vd,
                      const double* wk, double qx, double qy, double qth,
                      double r_zeta, double r_omega, double* cost_accum,
                      std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = x[i] - xd[i];
    const double dy = y[i] - yd[i];
    const double d = th[i] - thd[i];
    const double w = d - kTwoPiC * std::nearbyint(d * kInvTwoPiC);
    const double dv = zeta[i] - vd[i];
    const double t1 = qx * (dx * dx);
    const double t2 = qy * (dy * dy);
    const double t3 = qth * (w * w);
    const double t4 =
        r_scale[i] * ((r_zeta * (zeta[i] * zeta[i])) + (r_omega * (omega[i] * omega[i])));
    const double t5 = wk[i] * (dv * dv);
    cost_accum[i] += ((t1 + t2) + (t3 + t4)) + t5;
  }
}

}  // namespace tnav::kernels::detail

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tnav::kernels {

// Hot inner loops (windowed moment accumulation, map algebra, batched rollout
// costs) exist in a scalar reference form and an AVX2 form. The two are
// bit-exact by construction: identical per-element operation order, no FMA
// contraction (enforced by -ffp-contract=off), masked lanes contribute +0.0
// which is an exact no-op on every accumulator that can occur here.
enum class Backend { kScalar, kAvx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// Detection order: TNAV_KERNEL_BACKEND env override ("scalar"/"avx2"),
// then CPU feature probe, else scalar.
Backend active_backend();
void force_backend(Backend b);  // throws if unsupported on this CPU
void reset_backend();           // back to auto detection

// Second-moment sums over a side x side window centered on each cell, border
// windows clipped. NaN heights are vacant and contribute nothing; vacancy is
// side*side - n. Offsets x (columns) and y (rows) are window-local in meters,
// z is taken relative to z_ref so the sums are translation invariant.
// Per-cell accumulation order is row-major over the window in both backends.
struct MomentField {
  int rows = 0;
  int cols = 0;
  std::vector<double> n, sx, sy, sz, sxx, sxy, sxz, syy, syz, szz;
  void resize(int r, int c);
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

void window_moments(const double* heights, int rows, int cols, int side,
                    double cell, double z_ref, MomentField& out);

// Plain windowed sum of a dense field (no NaNs), same clipping and
// accumulation order as window_moments. Used with an analytic per-cell
// overlap count to form window means.
void window_box_sum(const double* values, int rows, int cols, int side,
                    double* out);

// out[i] = wa*a[i] + wb*b[i] + wc*c[i], evaluated as (wa*a + wb*b) + wc*c.
void weighted_sum3(const double* a, const double* b, const double* c,
                   double wa, double wb, double wc, double* out,
                   std::size_t count);

// Mean absolute elementwise difference. Summation contract: four interleaved
// partial sums by index stripe (i % 4), combined as (s0+s1)+(s2+s3); both
// backends implement exactly this order.
double mean_abs_diff(const double* a, const double* b, std::size_t count);

// Fused per-step tracking cost over a batch of rollouts. References are
// per-rollout arrays (each rollout tracks its own nearest path sample):
//   cost[i] += qx*(x[i]-xd[i])^2 + qy*(y[i]-yd[i])^2 + qth*wrap(th[i]-thd[i])^2
//            + r_scale[i]*(r_zeta*zeta[i]^2 + r_omega*omega[i]^2)
//            + wk[i]*(zeta[i]-vd[i])^2
// wrap uses d - 2*pi*nearbyint(d/(2*pi)) (round half to even), which both
// backends share bit-exactly.
void step_cost(const double* x, const double* y, const double* th,
               const double* zeta, const double* omega, const double* r_scale,
               const double* xd, const double* yd, const double* thd,
               const double* vd, const double* wk, double qx, double qy,
               double qth, double r_zeta, double r_omega, double* cost_accum,
               std::size_t count);

}  // namespace tnav::kernels

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"
#include "tnav/errors.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace tnav::kernels::detail {

bool avx2_compiled() {
#if defined(__AVX2__)
  return true;
#else
  return false;
#endif
}

#if !defined(__AVX2__)

namespace {
[[noreturn]] void unavailable() {
  throw InvariantError("AVX2 kernel invoked but not compiled in");
}
}  // namespace

void window_moments_avx2(const double*, int, int, int, double, double,
                         MomentField&) { unavailable(); }
void window_box_sum_avx2(const double*, int, int, int, double*) { unavailable(); }
void weighted_sum3_avx2(const double*, const double*, const double*, double,
                        double, double, double*, std::size_t) { unavailable(); }
double mean_abs_diff_avx2(const double*, const double*, std::size_t) {
  unavailable();
}
void step_cost_avx2(const double*, const double*, const double*, const double*,
                    const double*, const double*, const double*, const double*,
                    const double*, const double*, const double*, double, double,
                    double, double, double, double*, std::size_t) {
  unavailable();
}

#else

namespace {

constexpr double kTwoPiC = 6.283185307179586476925286766559;
constexpr double kInvTwoPiC = 1.0 / kTwoPiC;

// Scalar fallback for border cells: identical code to the scalar reference so
// the per-cell result is bit-identical by construction.
void moments_cell_scalar(const double* heights, int rows, int cols, int half,
                         double cell, double z_ref, int r, int c,
                         MomentField& out) {
  const std::size_t i = static_cast<std::size_t>(r) * cols + c;
  for (int dr = -half; dr <= half; ++dr) {
    const int nr = r + dr;
    if (nr < 0 || nr >= rows) continue;
    const double y = dr * cell;
    for (int dc = -half; dc <= half; ++dc) {
      const int nc = c + dc;
      if (nc < 0 || nc >= cols) continue;
      const double z = heights[static_cast<std::size_t>(nr) * cols + nc];
      if (std::isnan(z)) continue;
      const double x = dc * cell;
      const double zz = z - z_ref;
      out.n[i] += 1.0;
      out.sx[i] += x;
      out.sy[i] += y;
      out.sz[i] += zz;
      out.sxx[i] += x * x;
      out.sxy[i] += x * y;
      out.sxz[i] += x * zz;
      out.syy[i] += y * y;
      out.syz[i] += y * zz;
      out.szz[i] += zz * zz;
    }
  }
}

void box_cell_scalar(const double* values, int rows, int cols, int half, int r,
                     int c, double* out) {
  double acc = 0.0;
  for (int dr = -half; dr <= half; ++dr) {
    const int nr = r + dr;
    if (nr < 0 || nr >= rows) continue;
    for (int dc = -half; dc <= half; ++dc) {
      const int nc = c + dc;
      if (nc < 0 || nc >= cols) continue;
      acc += values[static_cast<std::size_t>(nr) * cols + nc];
    }
  }
  out[static_cast<std::size_t>(r) * cols + c] = acc;
}

}  // namespace

void window_moments_avx2(const double* heights, int rows, int cols, int side,
                         double cell, double z_ref, MomentField& out) {
  out.resize(rows, cols);
  const int half = side / 2;
  const __m256d vone = _mm256_set1_pd(1.0);
  const __m256d vzref = _mm256_set1_pd(z_ref);

  for (int r = 0; r < rows; ++r) {
    const bool row_interior = (r >= half && r < rows - half);
    int c = 0;
    if (row_interior) {
      for (; c < half && c < cols; ++c)
        moments_cell_scalar(heights, rows, cols, half, cell, z_ref, r, c, out);
      // Interior vector body: window fully inside the map, only NaN masking.
      for (; c + 4 <= cols - half; c += 4) {
        __m256d an = _mm256_setzero_pd(), asx = _mm256_setzero_pd(),
                asy = _mm256_setzero_pd(), asz = _mm256_setzero_pd(),
                asxx = _mm256_setzero_pd(), asxy = _mm256_setzero_pd(),
                asxz = _mm256_setzero_pd(), asyy = _mm256_setzero_pd(),
                asyz = _mm256_setzero_pd(), aszz = _mm256_setzero_pd();
        for (int dr = -half; dr <= half; ++dr) {
          const double y = dr * cell;
          const __m256d vy = _mm256_set1_pd(y);
          const __m256d vyy = _mm256_set1_pd(y * y);
          const double* src =
              heights + static_cast<std::size_t>(r + dr) * cols + c;
          for (int dc = -half; dc <= half; ++dc) {
            const double x = dc * cell;
            const __m256d vx = _mm256_set1_pd(x);
            const __m256d z = _mm256_loadu_pd(src + dc);
            const __m256d mask = _mm256_cmp_pd(z, z, _CMP_ORD_Q);
            const __m256d zz = _mm256_and_pd(_mm256_sub_pd(z, vzref), mask);
            an = _mm256_add_pd(an, _mm256_and_pd(vone, mask));
            asx = _mm256_add_pd(asx, _mm256_and_pd(vx, mask));
            asy = _mm256_add_pd(asy, _mm256_and_pd(vy, mask));
            asz = _mm256_add_pd(asz, zz);
            asxx = _mm256_add_pd(asxx, _mm256_and_pd(_mm256_set1_pd(x * x), mask));
            asxy = _mm256_add_pd(asxy, _mm256_and_pd(_mm256_set1_pd(x * y), mask));
            asxz = _mm256_add_pd(asxz, _mm256_mul_pd(vx, zz));
            asyy = _mm256_add_pd(asyy, _mm256_and_pd(vyy, mask));
            asyz = _mm256_add_pd(asyz, _mm256_mul_pd(vy, zz));
            aszz = _mm256_add_pd(aszz, _mm256_mul_pd(zz, zz));
          }
        }
        const std::size_t i = static_cast<std::size_t>(r) * cols + c;
        _mm256_storeu_pd(&out.n[i], an);
        _mm256_storeu_pd(&out.sx[i], asx);
        _mm256_storeu_pd(&out.sy[i], asy);
        _mm256_storeu_pd(&out.sz[i], asz);
        _mm256_storeu_pd(&out.sxx[i], asxx);
        _mm256_storeu_pd(&out.sxy[i], asxy);
        _mm256_storeu_pd(&out.sxz[i], asxz);
        _mm256_storeu_pd(&out.syy[i], asyy);
        _mm256_storeu_pd(&out.syz[i], asyz);
        _mm256_storeu_pd(&out.szz[i], aszz);
      }
    }
    for (; c < cols; ++c)
      moments_cell_scalar(heights, rows, cols, half, cell, z_ref, r, c, out);
  }
}

void window_box_sum_avx2(const double* values, int rows, int cols, int side,
                         double* out) {
  const int half = side / 2;
  for (int r = 0; r < rows; ++r) {
    const bool row_interior = (r >= half && r < rows - half);
    int c = 0;
    if (row_interior) {
      for (; c < half && c < cols; ++c)
        box_cell_scalar(values, rows, cols, half, r, c, out);
      for (; c + 4 <= cols - half; c += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int dr = -half; dr <= half; ++dr) {
          const double* src =
              values + static_cast<std::size_t>(r + dr) * cols + c;
          for (int dc = -half; dc <= half; ++dc)
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(src + dc));
        }
        _mm256_storeu_pd(out + static_cast<std::size_t>(r) * cols + c, acc);
      }
    }
    for (; c < cols; ++c) box_cell_scalar(values, rows, cols, half, r, c, out);
  }
}

void weighted_sum3_avx2(const double* a, const double* b, const double* c,
                        double wa, double wb, double wc, double* out,
                        std::size_t count) {
  const __m256d va = _mm256_set1_pd(wa);
  const __m256d vb = _mm256_set1_pd(wb);
  const __m256d vc = _mm256_set1_pd(wc);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(a + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(t, _mm256_mul_pd(vc, _mm256_loadu_pd(c + i))));
  }
  for (; i < count; ++i) out[i] = (wa * a[i] + wb * b[i]) + wc * c[i];
}

double mean_abs_diff_avx2(const double* a, const double* b, std::size_t count) {
  if (count == 0) return 0.0;
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    vacc = _mm256_add_pd(vacc, _mm256_andnot_pd(signmask, d));
  }
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < count; ++i) acc[i & 3] += std::fabs(a[i] - b[i]);
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) / static_cast<double>(count);
}

void step_cost_avx2(const double* x, const double* y, const double* th,
                    const double* zeta, const double* omega,
                    const double* r_scale, const double* xd, const double* yd,
                    const double* thd, const double* vd, const double* wk,
                    double qx, double qy, double qth, double r_zeta,
                    double r_omega, double* cost_accum, std::size_t count) {
  const __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy);
  const __m256d vqth = _mm256_set1_pd(qth);
  const __m256d vrz = _mm256_set1_pd(r_zeta), vro = _mm256_set1_pd(r_omega);
  const __m256d v2pi = _mm256_set1_pd(kTwoPiC);
  const __m256d vinv2pi = _mm256_set1_pd(kInvTwoPiC);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d dx =
        _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(xd + i));
    const __m256d dy =
        _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(yd + i));
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(th + i), _mm256_loadu_pd(thd + i));
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(d, vinv2pi),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256d w = _mm256_sub_pd(d, _mm256_mul_pd(v2pi, k));
    const __m256d vz = _mm256_loadu_pd(zeta + i);
    const __m256d vo = _mm256_loadu_pd(omega + i);
    const __m256d dv = _mm256_sub_pd(vz, _mm256_loadu_pd(vd + i));
    const __m256d t1 = _mm256_mul_pd(vqx, _mm256_mul_pd(dx, dx));
    const __m256d t2 = _mm256_mul_pd(vqy, _mm256_mul_pd(dy, dy));
    const __m256d t3 = _mm256_mul_pd(vqth, _mm256_mul_pd(w, w));
    const __m256d t4 = _mm256_mul_pd(
        _mm256_loadu_pd(r_scale + i),
        _mm256_add_pd(_mm256_mul_pd(vrz, _mm256_mul_pd(vz, vz)),
                      _mm256_mul_pd(vro, _mm256_mul_pd(vo, vo))));
    const __m256d t5 =
        _mm256_mul_pd(_mm256_loadu_pd(wk + i), _mm256_mul_pd(dv, dv));
    const __m256d sum = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(t1, t2), _mm256_add_pd(t3, t4)), t5);
    _mm256_storeu_pd(cost_accum + i,
                     _mm256_add_pd(_mm256_loadu_pd(cost_accum + i), sum));
  }
  for (; i < count; ++i) {
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

#endif  // __AVX2__

}  // namespace tnav::kernels::detail

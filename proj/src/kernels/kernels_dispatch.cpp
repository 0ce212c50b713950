#include <cstdlib>
#include <cstring>
#include <string>

#include "kernels_impl.hpp"
#include "tnav/errors.hpp"

namespace tnav::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend detect_backend() {
  if (const char* env = std::getenv("TNAV_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!backend_supported(Backend::kAvx2))
        throw ConfigError("TNAV_KERNEL_BACKEND=avx2 but AVX2 is unavailable");
      return Backend::kAvx2;
    }
    throw ConfigError(std::string("unknown TNAV_KERNEL_BACKEND value: ") + env);
  }
  return backend_supported(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

Backend& backend_slot() {
  static Backend b = detect_backend();
  return b;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::kScalar: return true;
    case Backend::kAvx2: return detail::avx2_compiled() && cpu_has_avx2();
  }
  return false;
}

Backend active_backend() { return backend_slot(); }

void force_backend(Backend b) {
  if (!backend_supported(b))
    throw ConfigError(std::string("kernel backend unsupported on this CPU: ") +
                      backend_name(b));
  backend_slot() = b;
}

void reset_backend() { backend_slot() = detect_backend(); }

void window_moments(const double* heights, int rows, int cols, int side,
                    double cell, double z_ref, MomentField& out) {
  TNAV_REQUIRE(side >= 1 && (side % 2) == 1, "window side must be odd");
  if (active_backend() == Backend::kAvx2)
    detail::window_moments_avx2(heights, rows, cols, side, cell, z_ref, out);
  else
    detail::window_moments_scalar(heights, rows, cols, side, cell, z_ref, out);
}

void window_box_sum(const double* values, int rows, int cols, int side,
                    double* out) {
  TNAV_REQUIRE(side >= 1 && (side % 2) == 1, "window side must be odd");
  if (active_backend() == Backend::kAvx2)
    detail::window_box_sum_avx2(values, rows, cols, side, out);
  else
    detail::window_box_sum_scalar(values, rows, cols, side, out);
}

void weighted_sum3(const double* a, const double* b, const double* c,
                   double wa, double wb, double wc, double* out,
                   std::size_t count) {
  if (active_backend() == Backend::kAvx2)
    detail::weighted_sum3_avx2(a, b, c, wa, wb, wc, out, count);
  else
    detail::weighted_sum3_scalar(a, b, c, wa, wb, wc, out, count);
}

double mean_abs_diff(const double* a, const double* b, std::size_t count) {
  if (active_backend() == Backend::kAvx2)
    return detail::mean_abs_diff_avx2(a, b, count);
  return detail::mean_abs_diff_scalar(a, b, count);
}

void step_cost(const double* x, const double* y, const double* th,
               const double* zeta, const double* omega, const double* r_scale,
               const double* xd, const double* yd, const double* thd,
               const double* vd, const double* wk, double qx, double qy,
               double qth, double r_zeta, double r_omega, double* cost_accum,
               std::size_t count) {
  if (active_backend() == Backend::kAvx2)
    detail::step_cost_avx2(x, y, th, zeta, omega, r_scale, xd, yd, thd, vd, wk,
                           qx, qy, qth, r_zeta, r_omega, cost_accum, count);
  else
    detail::step_cost_scalar(x, y, th, zeta, omega, r_scale, xd, yd, thd, vd,
                             wk, qx, qy, qth, r_zeta, r_omega, cost_accum,
                             count);
}

}  // namespace tnav::kernels

#pragma once

#include "tnav/kernels/kernels.hpp"

// Backend entry points. Each pair must satisfy the bit-exactness contract in
// kernels.hpp. The AVX2 symbols exist on every build; they throw when the TU
// was compiled without AVX2 support.
namespace tnav::kernels::detail {

void window_moments_scalar(const double* heights, int rows, int cols, int side,
                           double cell, double z_ref, MomentField& out);
void window_moments_avx2(const double* heights, int rows, int cols, int side,
                         double cell, double z_ref, MomentField& out);

void window_box_sum_scalar(const double* values, int rows, int cols, int side,
                           double* out);
void window_box_sum_avx2(const double* values, int rows, int cols, int side,
                         double* out);

void weighted_sum3_scalar(const double* a, const double* b, const double* c,
                          double wa, double wb, double wc, double* out,
                          std::size_t count);
void weighted_sum3_avx2(const double* a, const double* b, const double* c,
                        double wa, double wb, double wc, double* out,
                        std::size_t count);

double mean_abs_diff_scalar(const double* a, const double* b, std::size_t count);
double mean_abs_diff_avx2(const double* a, const double* b, std::size_t count);

void step_cost_scalar(const double* x, const double* y, const double* th,
                      const double* zeta, const double* omega,
                      const double* r_scale, const double* xd,
                      const double* yd, const double* thd, const double* vd,
                      const double* wk, double qx, double qy, double qth,
                      double r_zeta, double r_omega, double* cost_accum,
                      std::size_t count);
void step_cost_avx2(const double* x, const double* y, const double* th,
                    const double* zeta, const double* omega,
                    const double* r_scale, const double* xd, const double* yd,
                    const double* thd, const double* vd, const double* wk,
                    double qx, double qy, double qth, double r_zeta,
                    double r_omega, double* cost_accum, std::size_t count);

bool avx2_compiled();

}  // namespace tnav::kernels::detail

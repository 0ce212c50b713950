#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "tnav/kernels/kernels.hpp"
#include "tnav/rng.hpp"

namespace tnav::kernels {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool avx2_available() { return backend_supported(Backend::kAvx2); }

struct BackendGuard {
  ~BackendGuard() { reset_backend(); }
};

std::vector<double> random_field(Rng& rng, std::size_t n, double nan_frac) {
  std::vector<double> v(n);
  for (auto& x : v) {
    x = rng.uniform(0, 1) < nan_frac ? kNan : rng.uniform(-3.0, 3.0);
  }
  return v;
}

// Bit-level equality; NaN positions must agree too.
void expect_bits_equal(const std::vector<double>& a,
                       const std::vector<double>& b, const char* what) {
  ASSERT_EQ(a.size(), b.size()) << what;
  for (std::size_t i = 0; i < a.size(); ++i) {
    uint64_t ba, bb;
    std::memcpy(&ba, &a[i], 8);
    std::memcpy(&bb, &b[i], 8);
    ASSERT_EQ(ba, bb) << what << " index " << i << ": " << a[i]
                      << " != " << b[i];
  }
}

TEST(Kernels, BackendNames) {
  EXPECT_STREQ(backend_name(Backend::kScalar), "scalar");
  EXPECT_STREQ(backend_name(Backend::kAvx2), "avx2");
  EXPECT_TRUE(backend_supported(Backend::kScalar));
}

TEST(Kernels, ForceBackendRoundTrip) {
  BackendGuard guard;
  force_backend(Backend::kScalar);
  EXPECT_EQ(active_backend(), Backend::kScalar);
  reset_backend();
  if (avx2_available()) {
    force_backend(Backend::kAvx2);
    EXPECT_EQ(active_backend(), Backend::kAvx2);
  }
}

TEST(Kernels, WindowMomentsBruteForce) {
  // Scalar backend vs a direct O(rows*cols*side^2) reference.
  BackendGuard guard;
  force_backend(Backend::kScalar);
  Rng rng(hash64("moments-brute"));
  const int rows = 17, cols = 23, side = 5;
  const double cell = 0.1, z_ref = 0.37;
  const auto h = random_field(rng, rows * cols, 0.15);
  MomentField mf;
  window_moments(h.data(), rows, cols, side, cell, z_ref, mf);
  ASSERT_EQ(mf.rows, rows);
  ASSERT_EQ(mf.cols, cols);

  const int half = side / 2;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double n = 0, sx = 0, sy = 0, sz = 0;
      double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const double z = h[rr * cols + cc];
          if (std::isnan(z)) continue;
          const double x = dc * cell, y = dr * cell, zz = z - z_ref;
          n += 1;
          sx += x;
          sy += y;
          sz += zz;
          sxx += x * x;
          sxy += x * y;
          sxz += x * zz;
          syy += y * y;
          syz += y * zz;
          szz += zz * zz;
        }
      }
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      EXPECT_DOUBLE_EQ(mf.n[i], n);
      EXPECT_NEAR(mf.sx[i], sx, 1e-12);
      EXPECT_NEAR(mf.sy[i], sy, 1e-12);
      EXPECT_NEAR(mf.sz[i], sz, 1e-12);
      EXPECT_NEAR(mf.sxx[i], sxx, 1e-12);
      EXPECT_NEAR(mf.sxy[i], sxy, 1e-12);
      EXPECT_NEAR(mf.sxz[i], sxz, 1e-12);
      EXPECT_NEAR(mf.syy[i], syy, 1e-12);
      EXPECT_NEAR(mf.syz[i], syz, 1e-12);
      EXPECT_NEAR(mf.szz[i], szz, 1e-12);
    }
  }
}

TEST(Kernels, WindowBoxSumBruteForce) {
  BackendGuard guard;
  force_backend(Backend::kScalar);
  Rng rng(hash64("boxsum-brute"));
  const int rows = 13, cols = 29, side = 5;
  const auto v = random_field(rng, rows * cols, 0.0);
  std::vector<double> out(rows * cols);
  window_box_sum(v.data(), rows, cols, side, out.data());
  const int half = side / 2;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double s = 0;
      for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          s += v[rr * cols + cc];
        }
      }
      EXPECT_NEAR(out[r * cols + c], s, 1e-12) << r << "," << c;
    }
  }
}

TEST(Kernels, MeanAbsDiffSmallCases) {
  BackendGuard guard;
  force_backend(Backend::kScalar);
  const double a[] = {1.0, -2.0, 3.0, 0.5, -0.5};
  const double b[] = {0.0, 2.0, 3.0, -0.5, 0.5};
  EXPECT_DOUBLE_EQ(mean_abs_diff(a, b, 1), 1.0);
  EXPECT_DOUBLE_EQ(mean_abs_diff(a, b, 2), 2.5);
  EXPECT_DOUBLE_EQ(mean_abs_diff(a, b, 5), (1 + 4 + 0 + 1 + 1) / 5.0);
  EXPECT_DOUBLE_EQ(mean_abs_diff(a, b, 0), 0.0);
}

TEST(Kernels, WeightedSum3Order) {
  BackendGuard guard;
  force_backend(Backend::kScalar);
  const double a[] = {1.0}, b[] = {2.0}, c[] = {4.0};
  double out = 0;
  weighted_sum3(a, b, c, 0.3, 0.3, 0.4, &out, 1);
  EXPECT_DOUBLE_EQ(out, (0.3 * 1.0 + 0.3 * 2.0) + 0.4 * 4.0);
}

TEST(Kernels, StepCostMatchesFormula) {
  BackendGuard guard;
  force_backend(Backend::kScalar);
  Rng rng(hash64("stepcost"));
  const std::size_t n = 37;
  std::vector<double> x(n), y(n), th(n), zeta(n), omega(n), rs(n), xd(n),
      yd(n), thd(n), vd(n), wk(n), cost(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(-5, 5);
    y[i] = rng.uniform(-5, 5);
    th[i] = rng.uniform(-10, 10);
    zeta[i] = rng.uniform(-1, 1);
    omega[i] = rng.uniform(-2, 2);
    rs[i] = rng.uniform(1, 4);
    xd[i] = rng.uniform(-5, 5);
    yd[i] = rng.uniform(-5, 5);
    thd[i] = rng.uniform(-10, 10);
    vd[i] = rng.uniform(0, 1);
    wk[i] = rng.uniform(1, 30);
  }
  const double qx = 10, qy = 10, qth = 1, rz = 0.5, rw = 0.5;
  step_cost(x.data(), y.data(), th.data(), zeta.data(), omega.data(),
            rs.data(), xd.data(), yd.data(), thd.data(), vd.data(), wk.data(),
            qx, qy, qth, rz, rw, cost.data(), n);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = th[i] - thd[i];
    const double w = d - kTwoPi * std::nearbyint(d / kTwoPi);
    const double want = 1.0 + qx * (x[i] - xd[i]) * (x[i] - xd[i]) +
                        qy * (y[i] - yd[i]) * (y[i] - yd[i]) + qth * w * w +
                        rs[i] * (rz * zeta[i] * zeta[i] +
                                 rw * omega[i] * omega[i]) +
                        wk[i] * (zeta[i] - vd[i]) * (zeta[i] - vd[i]);
    EXPECT_NEAR(cost[i], want, 1e-9) << i;
  }
}

// --- Scalar vs AVX2 bit-exact equivalence ---------------------------------

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!avx2_available()) GTEST_SKIP() << "AVX2 not available";
  }
  void TearDown() override { reset_backend(); }
};

TEST_F(KernelEquivalence, WindowMoments) {
  Rng rng(hash64("eq-moments"));
  // Sizes straddle vector width boundaries and include degenerate maps.
  const int dims[][2] = {{1, 1},  {1, 7},   {3, 4},   {5, 5},
                         {7, 32}, {11, 33}, {19, 64}, {23, 65}};
  for (auto [rows, cols] : dims) {
    for (int side : {1, 3, 5, 7}) {
      const auto h = random_field(rng, rows * cols, 0.2);
      MomentField ms, mv;
      force_backend(Backend::kScalar);
      window_moments(h.data(), rows, cols, side, 0.1, 0.25, ms);
      force_backend(Backend::kAvx2);
      window_moments(h.data(), rows, cols, side, 0.1, 0.25, mv);
      for (auto field :
           {&MomentField::n, &MomentField::sx, &MomentField::sy,
            &MomentField::sz, &MomentField::sxx, &MomentField::sxy,
            &MomentField::sxz, &MomentField::syy, &MomentField::syz,
            &MomentField::szz}) {
        expect_bits_equal(ms.*field, mv.*field, "moments");
      }
    }
  }
}

TEST_F(KernelEquivalence, WindowBoxSum) {
  Rng rng(hash64("eq-boxsum"));
  const int dims[][2] = {{1, 1}, {2, 31}, {9, 32}, {13, 33}, {21, 100}};
  for (auto [rows, cols] : dims) {
    for (int side : {1, 3, 5}) {
      const auto v = random_field(rng, rows * cols, 0.0);
      std::vector<double> os(rows * cols), ov(rows * cols);
      force_backend(Backend::kScalar);
      window_box_sum(v.data(), rows, cols, side, os.data());
      force_backend(Backend::kAvx2);
      window_box_sum(v.data(), rows, cols, side, ov.data());
      expect_bits_equal(os, ov, "box_sum");
    }
  }
}

TEST_F(KernelEquivalence, WeightedSum3) {
  Rng rng(hash64("eq-wsum"));
  for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4},
                        std::size_t{5}, std::size_t{127}, std::size_t{1024}}) {
    const auto a = random_field(rng, n, 0.0);
    const auto b = random_field(rng, n, 0.0);
    const auto c = random_field(rng, n, 0.0);
    std::vector<double> os(n), ov(n);
    force_backend(Backend::kScalar);
    weighted_sum3(a.data(), b.data(), c.data(), 0.3, 0.3, 0.4, os.data(), n);
    force_backend(Backend::kAvx2);
    weighted_sum3(a.data(), b.data(), c.data(), 0.3, 0.3, 0.4, ov.data(), n);
    expect_bits_equal(os, ov, "weighted_sum3");
  }
}

TEST_F(KernelEquivalence, MeanAbsDiff) {
  Rng rng(hash64("eq-mad"));
  for (std::size_t n :
       {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{4},
        std::size_t{5}, std::size_t{8}, std::size_t{25}, std::size_t{1000},
        std::size_t{1001}, std::size_t{1002}, std::size_t{1003}}) {
    const auto a = random_field(rng, n, 0.0);
    const auto b = random_field(rng, n, 0.0);
    force_backend(Backend::kScalar);
    const double s = mean_abs_diff(a.data(), b.data(), n);
    force_backend(Backend::kAvx2);
    const double v = mean_abs_diff(a.data(), b.data(), n);
    uint64_t bs, bv;
    std::memcpy(&bs, &s, 8);
    std::memcpy(&bv, &v, 8);
    EXPECT_EQ(bs, bv) << "n=" << n << ": " << s << " vs " << v;
  }
}

TEST_F(KernelEquivalence, StepCost) {
  Rng rng(hash64("eq-stepcost"));
  for (std::size_t n :
       {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7},
        std::size_t{64}, std::size_t{255}, std::size_t{256}, std::size_t{257}}) {
    std::vector<double> x = random_field(rng, n, 0.0),
                        y = random_field(rng, n, 0.0),
                        th = random_field(rng, n, 0.0),
                        zeta = random_field(rng, n, 0.0),
                        omega = random_field(rng, n, 0.0),
                        rs = random_field(rng, n, 0.0),
                        xd = random_field(rng, n, 0.0),
                        yd = random_field(rng, n, 0.0),
                        thd = random_field(rng, n, 0.0),
                        vd = random_field(rng, n, 0.0),
                        wk = random_field(rng, n, 0.0);
    std::vector<double> cs(n, 0.5), cv(n, 0.5);
    force_backend(Backend::kScalar);
    step_cost(x.data(), y.data(), th.data(), zeta.data(), omega.data(),
              rs.data(), xd.data(), yd.data(), thd.data(), vd.data(),
              wk.data(), 10, 10, 1, 0.5, 0.5, cs.data(), n);
    force_backend(Backend::kAvx2);
    step_cost(x.data(), y.data(), th.data(), zeta.data(), omega.data(),
              rs.data(), xd.data(), yd.data(), thd.data(), vd.data(),
              wk.data(), 10, 10, 1, 0.5, 0.5, cv.data(), n);
    expect_bits_equal(cs, cv, "step_cost");
  }
}

}  // namespace
}  // namespace tnav::kernels

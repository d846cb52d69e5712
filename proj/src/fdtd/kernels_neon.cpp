#include "emenc/fdtd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace emenc::kernels {

namespace {

void curl_row(const CurlRow& r) {
  const float64x2_t ca_u = vdupq_n_f64(r.ca_u);
  const float64x2_t cb_u = vdupq_n_f64(r.cb_u);
  std::size_t i = 0;
  for (; i + 2 <= r.n; i += 2) {
    const float64x2_t da = vsubq_f64(vld1q_f64(r.a1 + i), vld1q_f64(r.a0 + i));
    const float64x2_t db = vsubq_f64(vld1q_f64(r.b1 + i), vld1q_f64(r.b0 + i));
    const float64x2_t curl = vsubq_f64(da, db);
    const float64x2_t ca = r.ca ? vld1q_f64(r.ca + i) : ca_u;
    const float64x2_t cb = r.cb ? vld1q_f64(r.cb + i) : cb_u;
    const float64x2_t o = vld1q_f64(r.out + i);
    // separate multiply and add: no fused rounding
    vst1q_f64(r.out + i, vaddq_f64(vmulq_f64(ca, o), vmulq_f64(cb, curl)));
  }
  for (; i < r.n; ++i) {
    const double ca = r.ca ? r.ca[i] : r.ca_u;
    const double cb = r.cb ? r.cb[i] : r.cb_u;
    const double curl = (r.a1[i] - r.a0[i]) - (r.b1[i] - r.b0[i]);
    r.out[i] = ca * r.out[i] + cb * curl;
  }
}

// Two 2-lane accumulators reproduce the four-lane order of the reference.
double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double r = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
             (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vmulq_f64(vld1q_f64(w + i), vld1q_f64(x + i)), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vmulq_f64(vld1q_f64(w + i + 2), vld1q_f64(x + i + 2)),
                                 vld1q_f64(y + i + 2)));
  }
  double r = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
             (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) r += w[i] * x[i] * y[i];
  return r;
}

bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

constexpr Table kNeon{"neon", curl_row, dot, weighted_dot, all_finite};

}  // namespace

const Table* neon_table_if_built() { return &kNeon; }

}  // namespace emenc::kernels

#else

namespace emenc::kernels {
const Table* neon_table_if_built() { return nullptr; }
}  // namespace emenc::kernels

#endif

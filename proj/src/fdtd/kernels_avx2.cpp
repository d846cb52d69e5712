#include "emenc/fdtd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace emenc::kernels {

namespace {

template <bool VarA, bool VarB>
void curl_row_impl(const CurlRow& r) {
  const __m256d ca_u = _mm256_set1_pd(r.ca_u);
  const __m256d cb_u = _mm256_set1_pd(r.cb_u);
  std::size_t i = 0;
  for (; i + 4 <= r.n; i += 4) {
    const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(r.a1 + i), _mm256_loadu_pd(r.a0 + i));
    const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(r.b1 + i), _mm256_loadu_pd(r.b0 + i));
    const __m256d curl = _mm256_sub_pd(da, db);
    const __m256d ca = VarA ? _mm256_loadu_pd(r.ca + i) : ca_u;
    const __m256d cb = VarB ? _mm256_loadu_pd(r.cb + i) : cb_u;
    const __m256d o = _mm256_loadu_pd(r.out + i);
    _mm256_storeu_pd(r.out + i, _mm256_add_pd(_mm256_mul_pd(ca, o), _mm256_mul_pd(cb, curl)));
  }
  for (; i < r.n; ++i) {
    const double ca = VarA ? r.ca[i] : r.ca_u;
    const double cb = VarB ? r.cb[i] : r.cb_u;
    const double curl = (r.a1[i] - r.a0[i]) - (r.b1[i] - r.b0[i]);
    r.out[i] = ca * r.out[i] + cb * curl;
  }
}

void curl_row(const CurlRow& r) {
  if (r.ca && r.cb) return curl_row_impl<true, true>(r);
  if (r.ca) return curl_row_impl<true, false>(r);
  if (r.cb) return curl_row_impl<false, true>(r);
  curl_row_impl<false, false>(r);
}

double reduce(__m256d acc) {
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double r = reduce(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wx, _mm256_loadu_pd(y + i)));
  }
  double r = reduce(acc);
  for (; i < n; ++i) r += w[i] * x[i] * y[i];
  return r;
}

bool all_finite(const double* x, std::size_t n) {
  // x - x is 0 for finite x and NaN otherwise.
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_sub_pd(v, v));
  }
  if (_mm256_movemask_pd(_mm256_cmp_pd(acc, acc, _CMP_UNORD_Q)) != 0) return false;
  for (; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

constexpr Table kAvx2{"avx2", curl_row, dot, weighted_dot, all_finite};

}  // namespace

const Table* avx2_table_if_built() { return &kAvx2; }

}  // namespace emenc::kernels

#else

namespace emenc::kernels {
const Table* avx2_table_if_built() { return nullptr; }
}  // namespace emenc::kernels

#endif

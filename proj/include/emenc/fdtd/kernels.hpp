#pragma once

#include <cstddef>

namespace emenc::kernels {

/// out[i] = ca[i] * out[i] + cb[i] * ((a1[i] - a0[i]) - (b1[i] - b0[i])), i < n.
/// A null ca / cb pointer selects the uniform value ca_u / cb_u.
struct CurlRow {
  double* out = nullptr;
  const double* a1 = nullptr;
  const double* a0 = nullptr;
  const double* b1 = nullptr;
  const double* b0 = nullptr;
  const double* ca = nullptr;
  const double* cb = nullptr;
  double ca_u = 1.0;
  double cb_u = 0.0;
  std::size_t n = 0;
};

/// One implementation of every hot loop. All variants produce bit-identical results: they use
/// the same operation order, no fused multiply-add, and reductions accumulate in four
/// interleaved lanes combined as (s0 + s1) + (s2 + s3), followed by the scalar tail.
struct Table {
  const char* name;
  void (*curl_row)(const CurlRow& row);
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// sum_i w[i] * x[i] * y[i]
  double (*weighted_dot)(const double* w, const double* x, const double* y, std::size_t n);
  bool (*all_finite)(const double* x, std::size_t n);
};

const Table& scalar();
/// nullptr when not built for this architecture or the CPU lacks the extension.
const Table* avx2();
const Table* neon();

/// Widest supported table; EMENC_KERNELS=scalar|avx2|neon forces a choice when available.
const Table& best();

}  // namespace emenc::kernels

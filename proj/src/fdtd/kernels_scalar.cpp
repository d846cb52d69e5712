#include <cmath>

#include "emenc/fdtd/kernels.hpp"

namespace emenc::kernels {

namespace {

void curl_row(const CurlRow& r) {
  for (std::size_t i = 0; i < r.n; ++i) {
    const double ca = r.ca ? r.ca[i] : r.ca_u;
    const double cb = r.cb ? r.cb[i] : r.cb_u;
    const double curl = (r.a1[i] - r.a0[i]) - (r.b1[i] - r.b0[i]);
    r.out[i] = ca * r.out[i] + cb * curl;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) s[l] += x[i + l] * y[i + l];
  double r = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) s[l] += w[i + l] * x[i + l] * y[i + l];
  double r = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) r += w[i] * x[i] * y[i];
  return r;
}

bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

constexpr Table kScalar{"scalar", curl_row, dot, weighted_dot, all_finite};

}  // namespace

const Table& scalar() { return kScalar; }

}  // namespace emenc::kernels

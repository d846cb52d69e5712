#pragma once

#include <cmath>
#include <limits>

namespace emenc {

/// A real number carried as (log|x|, sign). Zero is sign 0 with log_abs = -inf.
struct LogValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogValue from_double(double x) {
    if (x == 0.0 || std::isnan(x)) return {};
    return {std::log(std::abs(x)), x > 0 ? 1 : -1};
  }
  static LogValue from_log(double log_abs, int sign) {
    if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return {};
    return {log_abs, sign > 0 ? 1 : -1};
  }

  bool is_zero() const { return sign == 0; }
  /// Underflows to 0 or overflows to inf outside double range.
  double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

inline LogValue operator*(const LogValue& a, const LogValue& b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.log_abs + b.log_abs, a.sign * b.sign};
}

inline LogValue operator-(const LogValue& a) { return {a.log_abs, -a.sign}; }

/// Signed log-sum-exp.
inline LogValue operator+(const LogValue& a, const LogValue& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  const LogValue& big = a.log_abs >= b.log_abs ? a : b;
  const LogValue& small = a.log_abs >= b.log_abs ? b : a;
  const double r = std::exp(small.log_abs - big.log_abs);
  if (big.sign == small.sign) return {big.log_abs + std::log1p(r), big.sign};
  if (r == 1.0) return {};
  return {big.log_abs + std::log1p(-r), big.sign};
}

inline LogValue operator-(const LogValue& a, const LogValue& b) { return a + (-b); }

}  // namespace emenc
